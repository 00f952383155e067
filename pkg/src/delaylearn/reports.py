"""Plain-text report, summary, histogram and dump formats.

Every file ends with a ``schema:`` line naming its format and version.
Floats are written with fixed precision so repeated runs are byte-identical.
"""
from .experiment import EVALUATIONS, HIST_BINS, PHASES

REPORT_SCHEMA = "schema: delaylearn-report 1"
SUMMARY_SCHEMA = "schema: delaylearn-summary 1"
HISTOGRAM_SCHEMA = "# schema: delaylearn-histogram 1"
RASTER_SCHEMA = "# schema: delaylearn-raster 1"
ENCODING_SCHEMA = "# schema: delaylearn-encoding 1"


def _f(x):
    return f"{x:.6f}"


def _flag(x):
    return "true" if x else "false"


def theta_label(theta):
    return f"{theta:.2f}"


def format_scores(phase, s):
    modal = " ".join(f"{c}:{m}" for c, m in sorted(s.modal.items()))
    return [
        f"{phase}.trained_accuracy: {_f(s.trained_accuracy)}",
        f"{phase}.trained_separable: {_flag(s.trained_separable)}",
        f"{phase}.unseen_accuracy: {_f(s.unseen_accuracy)}",
        f"{phase}.unseen_separable: {_flag(s.unseen_separable)}",
        f"{phase}.n_clusters: {s.n_clusters}",
        f"{phase}.modal_clusters: {modal}",
        f"{phase}.assignment: " + " ".join(str(a) for a in s.assignment.tolist()),
    ]


def format_report(report, thresholds, delays_file=None):
    lines = [
        "record: network",
        f"seed: {report.seed}",
        "thresholds: " + " ".join(theta_label(t) for t in thresholds),
        "test_ids: " + " ".join(str(i) for i in report.test_ids),
        "test_labels: " + " ".join(str(c) for c in report.test_labels),
        "train_ids: " + " ".join(str(i) for i in report.train_order),
    ]
    for phase in PHASES:
        lines.append(f"readout_spikes.{phase}: {_f(report.readout_spikes[phase])}")
    if delays_file:
        lines.append(f"delays_file: {delays_file}")
    for theta in thresholds:
        lines.append(f"[theta {theta_label(theta)}]")
        for phase in PHASES:
            lines.extend(format_scores(phase, report.scores[phase][theta]))
    lines.append(REPORT_SCHEMA)
    return "\n".join(lines) + "\n"


def format_summary(summary, seeds):
    lines = [
        "record: summary",
        f"n_networks: {summary.n_networks}",
        "seeds: " + " ".join(str(s) for s in seeds),
    ]
    for theta in summary.thresholds:
        lines.append(f"[theta {theta_label(theta)}]")
        for (t, name), value in summary.rows.items():
            if t != theta:
                continue
            lines.append(f"{name}: {_f(value) if isinstance(value, float) else value}")
    lines.append(SUMMARY_SCHEMA)
    return "\n".join(lines) + "\n"


def histogram_name(theta, phase, evaluation):
    return f"hist_theta{theta_label(theta)}_{phase}_{evaluation}.txt"


def format_histogram(counts):
    lines = [f"{lo:.1f} {hi:.1f} {int(c)}"
             for lo, hi, c in zip(HIST_BINS[:-1], HIST_BINS[1:], counts)]
    lines.append(HISTOGRAM_SCHEMA)
    return "\n".join(lines) + "\n"


def histogram_files(summary):
    """``{file name: text}`` for every threshold x phase x evaluation."""
    out = {}
    for theta in summary.thresholds:
        for phase in PHASES:
            for ev in EVALUATIONS:
                out[histogram_name(theta, phase, ev)] = format_histogram(
                    summary.histograms[theta, phase, ev])
    return out


def raster_lines(rows):
    """``rows`` of (time, neuron, input_id, label), sorted by time then neuron."""
    return [f"{t:g} {n} {i} {c}" for t, n, i, c in sorted(rows)]
