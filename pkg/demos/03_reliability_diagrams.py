"""Render standard and test-based reliability diagrams side by side.

Writes four SVG files (plus their JSON specs) under demos/output/: a
well-calibrated model and a prevalence-shifted one, each in both styles. The
test-based style adds per-bin prediction distributions and the percentage of
predictions the binomial test rejects.
"""
from pathlib import Path

from caltest import (
    Dataset,
    GdaConfig,
    TestConfig,
    build_bins,
    BinStrategy,
    build_diagram,
    fit_logistic,
    predict_logistic,
    render_svg,
    sample,
)

out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

train_x, train_y = sample(GdaConfig(prevalence=0.5, seed=21), 14000)
b0, b1 = fit_logistic(train_x, train_y)

for label, test_prev in (("calibrated", 0.5), ("shifted", 0.4)):
    test_x, test_y = sample(GdaConfig(prevalence=test_prev, seed=22), 6000)
    ds = Dataset(predict_logistic(test_x, b0, b1), test_y)
    bins = build_bins(ds, BinStrategy("pava_bc"))
    for kind in ("standard", "test_based"):
        cfg = TestConfig(alpha=0.05) if kind == "test_based" else None
        spec = build_diagram(ds, bins, cfg, kind)
        path = out_dir / f"{label}_{kind}.svg"
        path.write_text(render_svg(spec), encoding="utf-8")
        path.with_suffix(".json").write_text(spec.to_json() + "\n", encoding="utf-8")
        print(f"wrote {path}")
        if kind == "test_based":
            worst = max((b.rejection_pct for b in spec.bins if b.count), default=0.0)
            print(f"  {label}: worst per-bin rejection {worst:.1f}%")
