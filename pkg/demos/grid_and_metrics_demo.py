"""Enumerate the adapter configuration grid, count trainable parameters,
and score a few answers with the token-F1 / exact-match metrics.

Run: python3 demos/grid_and_metrics_demo.py
"""

from ragharness.lora_grid import (
    ModelDims,
    enumerate_grid,
    param_matched_pairs,
    trainable_params,
)
from ragharness.metrics import exact_match, token_f1


def main():
    grid = enumerate_grid(("3B", "8B"), (4, 8, 16, 32, 64))
    print(f"{len(grid)} configurations; alpha is tied to 2*rank:")
    for cfg in grid[:5]:
        print(f"  {cfg.display_id:<24} alpha={cfg.lora_alpha}")
    print("  ...")

    dims = ModelDims.uniform(n_layers=28, d=3072)
    pairs = param_matched_pairs(grid)
    print(f"\n{len(pairs)} param-matched pairs; counts match within each pair:")
    for pair in pairs[:2]:
        qv = trainable_params(dims, pair.qv_config.rank, "qv_only")
        full = trainable_params(dims, pair.full_config.rank, "full_attention")
        print(
            f"  {pair.budget_label}: {pair.qv_config.display_id} ({qv:,}) vs "
            f"{pair.full_config.display_id} ({full:,})"
        )

    print("\nmetric behaviour on documentation-style answers:")
    cases = [
        ("The port is 6443.", "6443"),
        ("--windows-line-endings", "the --windows-line-endings flag"),
        ("port 6444", "port 6443"),
    ]
    for pred, gold in cases:
        print(
            f"  f1={token_f1(pred, gold):.3f} em={exact_match(pred, gold)!s:<5} "
            f"pred={pred!r} gold={gold!r}"
        )


if __name__ == "__main__":
    main()
