import json

import numpy as np
import pandas as pd

from ..analysis import EXACT

COLORS = ['#2980b9', '#c0392b', '#27ae60', '#8e44ad', '#e67e22', '#16a085', '#34495e',
          '#f39c12', '#7f8c8d', '#d35400', '#2c3e50']


def _rate_frame(table):
    """Errors with the rate to the previous level next to every norm column."""
    out = pd.DataFrame({'h': table.errors['h'], 'dofs': table.errors['dofs'].astype(int)})
    for col in table.norms:
        out[col] = table.errors[col].map(lambda v: f"{v:.3e}")
        rates = []
        for i in range(len(table.errors)):
            if i == 0:
                rates.append('')
            elif table.exact.loc[i, col]:
                rates.append(EXACT)
            elif np.isnan(table.rates.loc[i, col]):
                rates.append('-')
            else:
                rates.append(f"{table.rates.loc[i, col]:.2f}")
        out[f"{col} rate"] = rates
    return out


def generate_html_report(table, title="convergence study", output_path="report.html"):
    """Generates a standalone HTML page with a log-log convergence chart and the rate table."""

    # --- PREPARE DATA FOR CHARTS ---
    h = table.errors['h'].tolist()
    traces = []
    for i, col in enumerate(table.norms):
        values = table.errors[col].astype(float)
        # zero errors cannot sit on a log axis
        keep = values > 0
        traces.append({
            'x': [x for x, k in zip(h, keep) if k],
            'y': values[keep].tolist(),
            'mode': 'lines+markers',
            'type': 'scatter',
            'name': col,
            'marker': {'color': COLORS[i % len(COLORS)]},
        })

    final = table.final_rates()
    metric_boxes = "".join(
        f"""<div class="card metric-box">
                <div class="metric-val">{v if isinstance(v, str) else f'{v:.2f}'}</div>
                <div class="metric-label">{k} rate</div>
            </div>"""
        for k, v in final.items() if k in ('l2', 'h1', 'bnorm', 'triple')
    )

    table_html = _rate_frame(table).to_html(classes='display compact stripe hover', table_id='resultsTable',
                                            index=False, float_format=lambda v: f"{v:.4g}")

    # --- HTML STRUCTURE ---
    html_string = f"""
    <!DOCTYPE html>
    <html>
    <head>
        <title>Convergence Report: {title}</title>
        <meta charset="utf-8">
        <meta name="viewport" content="width=device-width, initial-scale=1">

        <!-- Plotly.js -->
        <script src="https://cdn.plot.ly/plotly-latest.min.js"></script>

        <style>
            body {{ font-family: 'Segoe UI', Tahoma, Geneva, Verdana, sans-serif; margin: 0; padding: 0; background-color: #f8f9fa; color: #333; }}
            .header {{ background: linear-gradient(135deg, #2c3e50, #3498db); color: white; padding: 20px 40px; margin-bottom: 30px; }}
            .header h1 {{ margin: 0; font-size: 24px; }}
            .header p {{ margin: 5px 0 0; opacity: 0.8; }}
            .container {{ max-width: 1400px; margin: 0 auto; padding: 0 20px; }}
            .card {{ background: white; border-radius: 8px; box-shadow: 0 2px 4px rgba(0,0,0,0.05); padding: 20px; margin-bottom: 20px; }}
            .card h2 {{ margin-top: 0; font-size: 18px; color: #2c3e50; border-bottom: 1px solid #eee; padding-bottom: 10px; }}
            .grid-4 {{ display: grid; grid-template-columns: repeat(4, 1fr); gap: 20px; }}
            .metric-box {{ text-align: center; padding: 15px; }}
            .metric-val {{ font-size: 24px; font-weight: bold; color: #2c3e50; }}
            .metric-label {{ font-size: 12px; color: #7f8c8d; text-transform: uppercase; letter-spacing: 1px; }}
            table {{ border-collapse: collapse; width: 100%; font-size: 13px; }}
            th, td {{ padding: 6px 10px; text-align: right; border-bottom: 1px solid #ecf0f1; }}
            th {{ background-color: #f1f3f5; color: #495057; }}
        </style>
    </head>
    <body>
        <div class="header">
            <h1>Convergence Report</h1>
            <p>{title} | {len(table)} level(s)</p>
        </div>

        <div class="container">
            <div class="grid-4">{metric_boxes}</div>

            <div class="card">
                <h2>Errors against mesh size</h2>
                <div id="convergenceChart"></div>
            </div>

            <div class="card">
                <h2>Errors and rates per level</h2>
                <div style="overflow-x: auto;">
                    {table_html}
                </div>
            </div>
        </div>

        <script>
            var traces = {json.dumps(traces)};
            var layout = {{
                xaxis: {{title: 'h', type: 'log', autorange: 'reversed'}},
                yaxis: {{title: 'error', type: 'log', exponentformat: 'e'}},
                height: 500,
                margin: {{t:20, b:50, l:70, r:20}},
                hovermode: 'closest'
            }};
            Plotly.newPlot('convergenceChart', traces, layout);
        </script>
    </body>
    </html>
    """

    with open(output_path, "w", encoding="utf-8") as f:
        f.write(html_string)

    print(f"HTML Report generated at: {output_path}")
    return output_path
