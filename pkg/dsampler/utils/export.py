"""
Экспорт кривых в Excel (XLSX).
"""

import io

import pandas as pd
from openpyxl import Workbook
from openpyxl.styles import Alignment, Border, Font, PatternFill, Side
from openpyxl.utils import get_column_letter


def create_curve_report(curve: pd.DataFrame, title: str, sheet: str = "Границы") -> io.BytesIO:
    """
    Создать отчёт с таблицей границ.
    Возвращает файл в памяти (BytesIO).

    Args:
        curve: Таблица rescale_curve
        title: Заголовок листа
        sheet: Имя листа
    """
    wb = Workbook()
    ws = wb.active
    ws.title = sheet[:31]

    # Стили
    header_fill = PatternFill(start_color="4472C4", end_color="4472C4", fill_type="solid")
    header_font_white = Font(bold=True, size=12, color="FFFFFF")
    center_align = Alignment(horizontal="center", vertical="center")
    thin_border = Border(
        left=Side(style='thin'),
        right=Side(style='thin'),
        top=Side(style='thin'),
        bottom=Side(style='thin')
    )

    ws['A1'] = title
    ws['A1'].font = Font(bold=True, size=14)
    ws.merge_cells(start_row=1, start_column=1, end_row=1, end_column=max(1, len(curve.columns)))

    # Заголовки колонок
    row = 3
    for col, name in enumerate(curve.columns, 1):
        cell = ws.cell(row=row, column=col, value=str(name))
        cell.font = header_font_white
        cell.fill = header_fill
        cell.alignment = center_align
        cell.border = thin_border

    # Данные
    for values in curve.itertuples(index=False):
        row += 1
        for col, value in enumerate(values, 1):
            cell = ws.cell(row=row, column=col, value=value.item() if hasattr(value, "item") else value)
            if isinstance(cell.value, float):
                cell.number_format = "0.000E+00"
            cell.border = thin_border

    for i in range(1, len(curve.columns) + 1):
        ws.column_dimensions[get_column_letter(i)].width = 14

    output = io.BytesIO()
    wb.save(output)
    output.seek(0)
    return output
