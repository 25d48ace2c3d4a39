"""
Export module for evaluation and bench reports.

Markdown builders live here; PDF rendering (WeasyPrint) is in `.pdf` and is
imported only when a PDF is requested.
"""

from .report import bench_markdown, evaluation_markdown

__all__ = [
    "bench_markdown",
    "evaluation_markdown",
]
