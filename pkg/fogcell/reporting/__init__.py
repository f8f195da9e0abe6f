from .csv_report import fmt, header_block, render_csv, render_key_values, write_text
