"""Run the bundled e-car corpus end to end with the curated decision
journal and print what each stage produced.

Usage: python3 demos/batch_run.py
"""

import json
import os
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, os.path.join(ROOT, "src"))

from irmtool.pipeline import Pipeline  # noqa: E402

FIXTURES = os.path.join(ROOT, "fixtures", "ecnp")


def load(state, name):
    with open(os.path.join(state, name), encoding="utf-8") as fh:
        return json.load(fh)


def print_tree(model):
    children = {d["parent"]: (d["mode"], d["children"])
                for d in model["decompositions"]}
    by_id = {i["id"]: i for i in model["invariants"]}
    all_children = {c for _, kids in children.values() for c in kids}
    roots = [i["id"] for i in model["invariants"]
             if i["id"] not in all_children]

    def walk(node_id, depth):
        inv = by_id[node_id]
        sig = " [%s]" % inv["signature"] if inv["signature"] else ""
        mark = " *" if inv["system_output"] else ""
        print("  " * depth + "%2d %-10s%s%s" % (node_id, inv["type"],
                                                sig, mark))
        if node_id in children:
            mode, kids = children[node_id]
            print("  " * depth + "   %s" % mode)
            for kid in kids:
                walk(kid, depth + 1)

    for root in roots:
        walk(root, 0)


def main():
    state = tempfile.mkdtemp(prefix="irm-demo-")
    pipe = Pipeline(state_dir=state,
                    input_path=os.path.join(FIXTURES, "requirements.txt"),
                    conllu_path=os.path.join(FIXTURES, "ecnp.conllu"),
                    journal_path=os.path.join(FIXTURES, "gold",
                                              "decisions.jsonl"))
    statuses = pipe.run()
    print("stages:")
    for name, status in statuses.items():
        print("  %-10s %s" % (name, "ok" if status.ran else "skipped"))

    catalog = load(state, "catalog.json")
    print("\ncomponents:")
    for comp in catalog["components"]:
        attrs = ", ".join(a["ident"] for a in comp["attributes"])
        print("  %-8s knows: %s" % (comp["name"], attrs))

    records = load(state, "classification.json")["records"]
    print("\nrequirement types:")
    for rec in records:
        timing = ""
        if rec["timing"]:
            timing = "  every %(max_period)ds" % rec["timing"]
        print("  %-14s %-11s%s" % (rec["key"], rec["type"], timing))

    model = load(state, "model.json")
    print("\ninvariant decomposition (* = system output):")
    print_tree(model)

    report = load(state, "report.json")
    print("\nvalidation: %s, %d configurations, %d errors, %d warnings" % (
        report["verdict"], report["configuration_count"],
        report["errors"], report["warnings"]))
    for cfg in report["configurations"]:
        picks = ", ".join("%s->%s" % (p, c)
                          for p, c in sorted(cfg["choices"].items()))
        print("  %s: choices {%s}" % (cfg["id"], picks))
    print("\nstate dir: %s" % state)


if __name__ == "__main__":
    main()
