"""
PDF summary of an experiment's JSON reports using ReportLab.
"""
import logging
from io import BytesIO
from pathlib import Path
from typing import Dict, List, Union

from reportlab.lib import colors
from reportlab.lib.enums import TA_CENTER
from reportlab.lib.pagesizes import letter
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

logger = logging.getLogger(__name__)

# Long numeric arrays (curves, per-time bounds) are summarized, not printed.
MAX_LIST_ITEMS = 12


def _format(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


class ReportPDFGenerator:
    """Render experiment reports (parsed JSON) as a PDF."""

    def __init__(self):
        self.styles = getSampleStyleSheet()
        self._setup_custom_styles()

    def _setup_custom_styles(self):
        self.styles.add(ParagraphStyle(
            name='ReportTitle',
            parent=self.styles['Heading1'],
            fontSize=22,
            textColor=colors.HexColor('#2C3E50'),
            spaceAfter=24,
            alignment=TA_CENTER,
            fontName='Helvetica-Bold'
        ))
        self.styles.add(ParagraphStyle(
            name='SectionHeading',
            parent=self.styles['Heading2'],
            fontSize=15,
            textColor=colors.HexColor('#34495E'),
            spaceAfter=10,
            spaceBefore=12,
            fontName='Helvetica-Bold'
        ))
        self.styles.add(ParagraphStyle(
            name='BodySmall',
            parent=self.styles['Normal'],
            fontSize=9,
            spaceAfter=4
        ))

    def generate(self, reports: Dict[str, Union[dict, list]], title: str) -> BytesIO:
        """
        Build the PDF.

        Args:
            reports: Section name -> report data (dict or list of dicts)
            title: Document title

        Returns:
            BytesIO buffer containing the PDF
        """
        buffer = BytesIO()
        doc = SimpleDocTemplate(
            buffer,
            pagesize=letter,
            rightMargin=60,
            leftMargin=60,
            topMargin=60,
            bottomMargin=40
        )

        story = [Paragraph(title, self.styles['ReportTitle'])]
        if not reports:
            story.append(Paragraph("No reports found.", self.styles['Normal']))
        for name, data in reports.items():
            story.append(Paragraph(name.replace('_', ' ').title(), self.styles['SectionHeading']))
            items = data if isinstance(data, list) else [data]
            for item in items:
                story.append(self._summary_table(item))
                story.append(Spacer(1, 0.15 * inch))

        doc.build(story)
        buffer.seek(0)
        return buffer

    def _summary_table(self, data) -> Table:
        """Two-column key/value table; nested lists of records become nested tables."""
        rows: List[list] = [['Field', 'Value']]
        if not isinstance(data, dict):
            data = {"value": data}
        for key, value in data.items():
            rows.append([key, self._cell(value)])
        table = Table(rows, colWidths=[1.8 * inch, 4.6 * inch])
        table.setStyle(TableStyle([
            ('BACKGROUND', (0, 0), (-1, 0), colors.HexColor('#34495E')),
            ('TEXTCOLOR', (0, 0), (-1, 0), colors.whitesmoke),
            ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
            ('FONTSIZE', (0, 0), (-1, -1), 8),
            ('VALIGN', (0, 0), (-1, -1), 'TOP'),
            ('GRID', (0, 0), (-1, -1), 0.5, colors.grey),
            ('ROWBACKGROUNDS', (0, 1), (-1, -1), [colors.white, colors.HexColor('#F4F6F7')])
        ]))
        return table

    def _cell(self, value):
        if isinstance(value, list):
            if value and all(isinstance(v, dict) for v in value):
                keys = list(value[0].keys())
                rows = [keys] + [[_format(v.get(k)) for k in keys] for v in value[:MAX_LIST_ITEMS]]
                return Table(rows, style=[('FONTSIZE', (0, 0), (-1, -1), 7),
                                          ('GRID', (0, 0), (-1, -1), 0.25, colors.lightgrey)])
            shown = ", ".join(_format(v) for v in value[:MAX_LIST_ITEMS])
            if len(value) > MAX_LIST_ITEMS:
                shown += f", ... ({len(value)} values)"
            return Paragraph(shown, self.styles['BodySmall'])
        return Paragraph(_format(value), self.styles['BodySmall'])

    def save_to_file(self, reports: Dict[str, Union[dict, list]], title: str, filename: Union[str, Path]) -> Path:
        buffer = self.generate(reports, title)
        with open(filename, 'wb') as f:
            f.write(buffer.read())
        logger.info(f"PDF saved to: {filename}")
        return Path(filename)


def generate_pdf(reports: Dict[str, Union[dict, list]], title: str) -> BytesIO:
    """Helper function to generate PDF content."""
    return ReportPDFGenerator().generate(reports, title)
