import plotly.graph_objects as go
import plotly.io as pio
import numpy as np
import pandas as pd
from typing import Optional

from spectrum import MultiplierSet, ScanResult


class SpectrumVisualizer:
    def __init__(self):
        # Color palette shared by every figure
        self.color_palette = [
            '#2E86AB', '#A23B72', '#F18F01', '#C73E1D', '#5D737E',
            '#8B5A3C', '#6A994E', '#BC4749', '#F2B705', '#264653'
        ]

        self.common_layout = {
            'font': dict(size=12, color='#1F2937'),
            'title_font': dict(size=14, color='#111827', family='Arial, sans-serif'),
            'plot_bgcolor': '#FAFBFC',
            'paper_bgcolor': 'white',
            'margin': dict(l=10, r=10, t=50, b=10)
        }

    def _get_hover_styling(self):
        """Get consistent hover styling for all charts."""
        return dict(
            bgcolor='rgba(0,0,0,0.9)',
            bordercolor='rgba(255,255,255,0.8)',
            font=dict(color='white', size=12, family='Arial, sans-serif')
        )

    def _axis(self, title: str, **extra) -> dict:
        return dict(
            title=dict(text=title, font=dict(size=12, color='#111827')),
            tickfont=dict(size=10, color='#1F2937'),
            gridcolor='#E5E7EB',
            gridwidth=1,
            **extra
        )

    def _empty_figure(self, title: str) -> go.Figure:
        fig = go.Figure()
        fig.add_annotation(
            text="No data available",
            xref="paper", yref="paper",
            x=0.5, y=0.5, showarrow=False,
            font=dict(size=16, color="#374151")
        )
        fig.update_layout(
            title=dict(text=title, font=dict(size=14, color='#111827', family='Arial, sans-serif')),
            height=400,
            showlegend=False,
            **self.common_layout
        )
        return fig

    def create_band_chart(self, scan: ScanResult, title: str = "Spectral distance on the real axis") -> go.Figure:
        """Distance to the unit circle along a real scan; the spectrum is where it touches tol_circle."""
        data = scan.to_frame() if scan.mode == "real" else pd.DataFrame()
        data = data.dropna(subset=["distance"]) if not data.empty else data
        if data.empty:
            return self._empty_figure(title)

        # log axis: distances inside the spectrum are ~1e-12
        floor = max(scan.tol_circle * 1e-6, 1e-300)
        distances = np.maximum(data["distance"].to_numpy(), floor)
        colors = [self.color_palette[2] if flag else self.color_palette[0] for flag in data["in_spectrum"]]

        fig = go.Figure()
        fig.add_trace(go.Scatter(
            x=data["lambda"],
            y=distances,
            mode='lines+markers',
            line=dict(color=self.color_palette[0], width=1),
            marker=dict(color=colors, size=5),
            name='distance',
            hovertemplate="<b style='color: white;'>λ = %{x:.6g}</b><br>" +
                          "<span style='color: white;'>distance: %{y:.3e}</span><extra></extra>",
            hoverlabel=self._get_hover_styling()
        ))
        fig.add_hline(y=scan.tol_circle, line_dash='dash', line_color=self.color_palette[3],
                      annotation_text='tol_circle')
        fig.update_layout(
            title=dict(text=title, font=dict(size=14, color='#111827', family='Arial, sans-serif')),
            height=400,
            xaxis=self._axis("λ", zeroline=False),
            yaxis=self._axis("min | |μ| − 1 |", type='log'),
            showlegend=False,
            **self.common_layout
        )
        return fig

    def create_region_heatmap(self, scan: ScanResult, title: str = "Spectral distance over the complex plane") -> go.Figure:
        """Heat map of log10 distance; rows are constant Im(λ)."""
        if scan.mode != "region" or scan.points.size == 0:
            return self._empty_figure(title)

        grid = scan.distance_grid()
        points = scan.points.reshape(grid.shape)
        with np.errstate(divide='ignore'):
            z = np.log10(np.maximum(grid, 1e-16))

        fig = go.Figure(go.Heatmap(
            x=points[0].real,
            y=points[:, 0].imag,
            z=z,
            colorscale='Viridis',
            reversescale=True,
            colorbar=dict(title='log10 distance'),
            hovertemplate="<b style='color: white;'>λ = %{x:.4g} + %{y:.4g}i</b><br>" +
                          "<span style='color: white;'>log10 distance: %{z:.2f}</span><extra></extra>",
            hoverlabel=self._get_hover_styling()
        ))
        fig.update_layout(
            title=dict(text=title, font=dict(size=14, color='#111827', family='Arial, sans-serif')),
            height=500,
            xaxis=self._axis("Re λ"),
            yaxis=self._axis("Im λ"),
            **self.common_layout
        )
        return fig

    def create_multiplier_chart(self, ms: MultiplierSet, title: Optional[str] = None) -> go.Figure:
        """Multipliers against the unit circle."""
        title = title or f"Floquet multipliers at λ = {ms.lam:.6g}"
        if len(ms) == 0:
            return self._empty_figure(title)

        theta = np.linspace(0.0, 2.0 * np.pi, 361)
        fig = go.Figure()
        fig.add_trace(go.Scatter(
            x=np.cos(theta), y=np.sin(theta),
            mode='lines',
            line=dict(color='#9CA3AF', dash='dot'),
            name='unit circle',
            hoverinfo='skip'
        ))
        fig.add_trace(go.Scatter(
            x=ms.multipliers.real,
            y=ms.multipliers.imag,
            mode='markers',
            marker=dict(color=self.color_palette[1], size=10, line=dict(color='white', width=1)),
            customdata=ms.moduli,
            name='μ',
            hovertemplate="<b style='color: white;'>μ = %{x:.6g} + %{y:.6g}i</b><br>" +
                          "<span style='color: white;'>|μ| = %{customdata:.6g}</span><extra></extra>",
            hoverlabel=self._get_hover_styling()
        ))
        fig.update_layout(
            title=dict(text=title, font=dict(size=14, color='#111827', family='Arial, sans-serif')),
            height=500,
            xaxis=self._axis("Re μ", zeroline=True),
            yaxis=self._axis("Im μ", zeroline=True, scaleanchor='x'),
            showlegend=False,
            **self.common_layout
        )
        return fig

    def create_curve_chart(self, curves: pd.DataFrame, title: str = "Spectral curves") -> go.Figure:
        """Eigenvalues of T_t coloured by t."""
        if curves.empty:
            return self._empty_figure(title)

        fig = go.Figure(go.Scatter(
            x=curves['re_lambda'],
            y=curves['im_lambda'],
            mode='markers',
            marker=dict(
                color=curves['t'],
                colorscale='Twilight',
                cmin=0.0,
                cmax=2.0 * np.pi,
                size=6,
                colorbar=dict(title='t'),
                symbol=['circle' if refined else 'x' for refined in curves['refined']]
            ),
            customdata=curves[['t', 'residual']].to_numpy(),
            hovertemplate="<b style='color: white;'>λ = %{x:.6g} + %{y:.6g}i</b><br>" +
                          "<span style='color: white;'>t = %{customdata[0]:.4f}</span><br>" +
                          "<span style='color: white;'>|D_t| = %{customdata[1]:.2e}</span><extra></extra>",
            hoverlabel=self._get_hover_styling()
        ))
        fig.update_layout(
            title=dict(text=title, font=dict(size=14, color='#111827', family='Arial, sans-serif')),
            height=500,
            xaxis=self._axis("Re λ"),
            yaxis=self._axis("Im λ"),
            showlegend=False,
            **self.common_layout
        )
        return fig

    def save_figure(self, fig: go.Figure, path: str):
        """Write the figure spec as Plotly JSON (nothing is rendered)."""
        pio.write_json(fig, path, pretty=True)
