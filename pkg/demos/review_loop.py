"""Start from a bare corpus (no journal) and answer every pending
decision with its suggested choice, the way a reviewer clicking
"accept" through the queue would.  Prints each card as it is decided.

Usage: python3 demos/review_loop.py
"""

import os
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, os.path.join(ROOT, "src"))

from irmtool.journal import Decision, DecisionJournal  # noqa: E402
from irmtool.pipeline import Pipeline  # noqa: E402

FIXTURES = os.path.join(ROOT, "fixtures", "ecnp")


def evidence_line(req):
    ev = req.get("evidence") or {}
    if "score" in ev:
        return "score %.4f" % ev["score"]
    if "votes" in ev:
        return "votes " + str(ev["votes"])
    if "rule" in ev:
        return "rule " + str(ev["rule"])
    if "producers" in ev:
        return "also produced by " + ", ".join(ev["producers"])
    return ""


def main():
    state = tempfile.mkdtemp(prefix="irm-review-")
    journal_path = os.path.join(state, "decisions.jsonl")
    pipe = Pipeline(state_dir=state,
                    input_path=os.path.join(FIXTURES, "requirements.txt"),
                    conllu_path=os.path.join(FIXTURES, "ecnp.conllu"),
                    journal_path=journal_path)
    journal = DecisionJournal.load(journal_path)

    for round_no in range(1, 60):
        pipe.run()
        pending = pipe.pending_requests()
        if not pending:
            break
        req = pending[0]
        print("%2d  %-12s %-40s -> %-10s %s" % (
            round_no, req["kind"], req["target"],
            str(req["suggested"])[:24], evidence_line(req)))
        journal.append(Decision(req["request_id"], req["kind"],
                                req["target"], req["suggested"], "demo"))

    report = pipe._read_json("report.json")
    print("\nafter %d decisions: %s, %d configurations" % (
        journal.revision, report["verdict"],
        report["configuration_count"]))
    model = pipe._read_json("model.json")
    ors = [d for d in model["decompositions"] if d["mode"] == "OR"]
    print("model: %d invariants, OR alternatives: %s" % (
        len(model["invariants"]), [len(d["children"]) for d in ors]))
    print("journal: %s" % journal_path)


if __name__ == "__main__":
    main()
