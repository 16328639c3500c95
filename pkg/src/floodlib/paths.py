"""Output layout for one experiment directory."""

from pathlib import Path


class AuxPaths:
    """Fold checkpoints, base checkpoint and flood table of one aux pipeline run."""

    def __init__(self, root: Path):
        self.root = root
        self.base_checkpoint = root / "base.ckpt"
        self.flood_table_csv = root / "flood_table.csv"

    def fold_checkpoint(self, fold: int) -> Path:
        return self.root / f"fold_{fold}.ckpt"


class ExperimentPaths:
    """Manages paths under ``<out_dir>/<experiment name>``."""

    def __init__(self, out_dir: Path, name: str):
        """Initialize experiment paths.

        Args:
            out_dir: Output root shared by all experiments
            name: Experiment name (directory under out_dir)
        """
        self.out_dir = out_dir
        self.root = out_dir / name

        self.data = self.root / "data"
        self.aux = AuxPaths(self.root / "aux")

        self.config_snapshot = self.root / "config.json"
        self.ledger_file = self.root / "ledger.jsonl"
        self.summary_file = self.root / "summary.json"
        self.timings_file = self.root / "timings.json"
        self.evaluation_file = self.root / "evaluation.json"
        self.calibration_summary_file = self.root / "calibration_summary.json"
        self.proposition_file = self.root / "proposition.json"
        self.ablation_file = self.root / "ablation.json"
        self.ablation_timings_file = self.root / "ablation_timings.json"
        self.motivation_file = self.root / "motivation.json"

        self.data_manifest = self.data / "manifest.json"

    def data_csv(self, split: str) -> Path:
        """CSV export for a data split (train, val, test, b)."""
        return self.data / f"{split}.csv"

    def seed_dir(self, seed: int) -> Path:
        return self.root / str(seed)

    def run_dir(self, seed: int, method: str) -> Path:
        return self.seed_dir(seed) / method

    def model_checkpoint(self, seed: int, method: str) -> Path:
        return self.run_dir(seed, method) / "model.ckpt"

    def metrics_file(self, seed: int, method: str) -> Path:
        return self.run_dir(seed, method) / "metrics.json"

    def calibration_file(self, seed: int, method: str) -> Path:
        return self.run_dir(seed, method) / "calibration.json"

    def ablation_aux(self, label: str) -> AuxPaths:
        return AuxPaths(self.root / "ablation" / label)

    def get_all_directories(self) -> list[Path]:
        return [self.root, self.data, self.aux.root]

    def ensure(self) -> None:
        for directory in self.get_all_directories():
            directory.mkdir(parents=True, exist_ok=True)
