"""
PDF export of evaluation and bench reports.

Uses WeasyPrint to convert the markdown reports (rendered to HTML) to PDF.
"""

import io
from html import escape
from pathlib import Path

import markdown
from weasyprint import HTML


def render_markdown(content: str) -> str:
    """Convert markdown content to HTML."""
    if not content:
        return ""
    return markdown.markdown(content, extensions=["tables", "fenced_code"])


def render_html(content: str, title: str = "DFM report") -> str:
    """Complete HTML document around a markdown report body."""
    body = render_markdown(content)
    return f"""<!DOCTYPE html>
<html>
<head>
    <meta charset="UTF-8">
    <title>{escape(title)}</title>
    <style>
        @page {{
            size: 8.5in 11in;
            margin: 0.75in;

            @bottom-center {{
                content: counter(page);
                font-size: 9pt;
                color: #6b7280;
            }}
        }}

        body {{
            font-family: -apple-system, 'Segoe UI', Roboto, 'Helvetica Neue', Arial, sans-serif;
            font-size: 10pt;
            line-height: 1.5;
            color: #1f2937;
        }}

        h1 {{
            font-size: 18pt;
            border-bottom: 2px solid #2563eb;
            padding-bottom: 0.1in;
        }}

        h2 {{
            font-size: 13pt;
            page-break-after: avoid;
        }}

        table {{
            width: 100%;
            border-collapse: collapse;
            page-break-inside: avoid;
            margin: 0.1in 0 0.2in 0;
        }}

        th, td {{
            border: 1px solid #d1d5db;
            padding: 4px 8px;
            text-align: left;
        }}

        th {{
            background: #f3f4f6;
        }}
    </style>
</head>
<body>
{body}
</body>
</html>
"""


def generate_pdf(content: str, title: str = "DFM report") -> bytes:
    """Render a markdown report to PDF bytes."""
    html = HTML(string=render_html(content, title))
    pdf_buffer = io.BytesIO()
    html.write_pdf(pdf_buffer)
    return pdf_buffer.getvalue()


def write_pdf(path: Path | str, content: str, title: str = "DFM report") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(generate_pdf(content, title))
    return path
