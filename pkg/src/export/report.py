"""Reconstruction report export"""

import json
from dataclasses import asdict, dataclass, field
from datetime import datetime
from typing import List, Optional


@dataclass
class ReconstructionReport:
    """Per-patch losses of one masked reconstruction"""
    checkpoint: str
    cloud: str
    num_points: int
    num_patches: int
    patch_size: int
    mask_ratio: float
    prefix_fraction: float
    hidden_tokens: List[int]
    chamfer: List[float]
    color: Optional[List[float]] = None
    created_at: str = field(default_factory=lambda: datetime.now().isoformat(timespec="seconds"))

    @property
    def mean_chamfer(self) -> float:
        return float(sum(self.chamfer) / len(self.chamfer)) if self.chamfer else 0.0

    @property
    def mean_color(self) -> Optional[float]:
        if not self.color:
            return None
        return float(sum(self.color) / len(self.color))


class ReconstructionReportExporter:
    """Exports reconstruction reports to Markdown and JSON"""

    def export(self, report: ReconstructionReport) -> str:
        """
        Export report to Markdown format

        Args:
            report: Report to export

        Returns:
            Markdown string
        """
        lines = []
        lines.append(f"# Reconstruction of {report.cloud}")
        lines.append("")
        lines.append(f"**Checkpoint:** {report.checkpoint}")
        lines.append(f"**Created:** {report.created_at}")
        lines.append(f"**Points:** {report.num_points}  **Patches:** {report.num_patches}  **k:** {report.patch_size}")
        lines.append(
            f"**Masking:** m={report.mask_ratio}, prefix={report.prefix_fraction}, "
            f"hidden tokens={report.hidden_tokens or 'none'}"
        )
        lines.append("")
        lines.append("---")
        lines.append("")

        lines.append("## Summary")
        lines.append("")
        lines.append(f"- Mean Chamfer: {report.mean_chamfer:.6g}")
        if report.mean_color is not None:
            lines.append(f"- Mean color loss: {report.mean_color:.6g}")
        lines.append("")

        lines.append("## Patches")
        lines.append("")
        hidden = set(report.hidden_tokens)
        if report.color is not None:
            lines.append("| Patch | Hidden | Chamfer | Color |")
            lines.append("|---|---|---|---|")
            for i, (ch, co) in enumerate(zip(report.chamfer, report.color)):
                lines.append(f"| {i} | {'yes' if i in hidden else ''} | {ch:.6g} | {co:.6g} |")
        else:
            lines.append("| Patch | Hidden | Chamfer |")
            lines.append("|---|---|---|")
            for i, ch in enumerate(report.chamfer):
                lines.append(f"| {i} | {'yes' if i in hidden else ''} | {ch:.6g} |")
        lines.append("")
        return "\n".join(lines)

    def export_json(self, report: ReconstructionReport) -> str:
        data = asdict(report)
        data["mean_chamfer"] = report.mean_chamfer
        data["mean_color"] = report.mean_color
        return json.dumps(data, indent=2)
