#!/usr/bin/env python3
"""End-to-end checks for the ccattack command line tool.

Every subcommand runs twice with the same seed; outputs must be
byte-identical. Exit codes for the documented failure classes are pinned.
"""
import hashlib
import json
import os
import subprocess
import sys
import tempfile

CLI = os.environ.get("CCATTACK_CLI")
if not CLI:
    sys.exit("CCATTACK_CLI must point at the built binary")

SAMPLES = [
    ("s0", "int getTotal(int alpha, int beta) { int result = alpha + beta; return result; }",
     "computes the total from alpha and beta"),
    ("s1", "int scaleValue(int amount, int factor) { int scaled = amount * factor; return scaled; }",
     "scales the amount by the factor"),
    ("s2", "int pickLarger(int first, int second) { if (first > second) { return first; } return second; }",
     "picks the larger of the two numbers"),
    ("s3", "int sumRange(int start, int stop) { int total = 0; for (int i = start; i < stop; i = i + 1) { total = total + i; } return total; }",
     "sums the integers in the given range"),
    ("s4", "int halveValue(int amount) { int half = amount / 2; return half; }",
     "halves the given amount"),
    ("s5", "int negateValue(int amount) { int flipped = 0 - amount; return flipped; }",
     "negates the given amount"),
    ("s6", "int squareValue(int amount) { int squared = amount * amount; return squared; }",
     "squares the given amount"),
    ("s7", "int clampLow(int amount, int floor) { if (amount < floor) { return floor; } return amount; }",
     "clamps the amount to the floor"),
]

failures = []


def run(args, expect=0):
    proc = subprocess.run([CLI] + args, capture_output=True, text=True)
    if proc.returncode != expect:
        failures.append("exit %d != %d for: %s\nstdout: %s\nstderr: %s" % (
            proc.returncode, expect, " ".join(args), proc.stdout, proc.stderr))
    return proc


def sha256(path):
    with open(path, "rb") as f:
        return hashlib.sha256(f.read()).hexdigest()


def check_same(path_a, path_b, label):
    if sha256(path_a) != sha256(path_b):
        failures.append("rerun of %s was not byte-identical" % label)


def main():
    tmp = tempfile.mkdtemp(prefix="ccattack_cli_")
    data = os.path.join(tmp, "data.jsonl")
    with open(data, "w") as f:
        for sid, code, comment in SAMPLES:
            f.write(json.dumps({"id": sid, "code": code, "comment": comment},
                               sort_keys=True) + "\n")
    surrogate = "builtin:surrogate:" + data

    def p(name):
        return os.path.join(tmp, name)

    # Deterministic reruns, subcommand by subcommand.
    for tag in ("a", "b"):
        run(["embed-train", "--data", data, "--lang", "java",
             "--out", p("emb_%s.txt" % tag), "--dim", "16", "--epochs", "2",
             "--min-count", "1", "--seed", "3"])
    check_same(p("emb_a.txt"), p("emb_b.txt"), "embed-train")

    for method in ("accent", "random", "mh"):
        for tag in ("a", "b"):
            args = ["attack", "--data", data, "--lang", "java",
                    "--adapter", surrogate, "--method", method,
                    "--out", p("%s_%s.jsonl" % (method, tag)), "--seed", "5"]
            if method != "random":
                args += ["--embed", p("emb_a.txt")]
            if method == "mh":
                args += ["--mh-iterations", "30"]
            run(args)
        check_same(p("%s_a.jsonl" % method), p("%s_b.jsonl" % method),
                   "attack --method " + method)

    for tag in ("a", "b"):
        run(["mask", "--data", data, "--lang", "java",
             "--out", p("mask_%s.jsonl" % tag), "--seed", "11"])
    check_same(p("mask_a.jsonl"), p("mask_b.jsonl"), "mask")

    for tag in ("a", "b"):
        run(["train-toy", "--data", data, "--lang", "java",
             "--out", p("toy_%s.model" % tag), "--curve", p("curve_%s.csv" % tag),
             "--epochs", "20", "--seed", "13"])
    check_same(p("toy_a.model"), p("toy_b.model"), "train-toy model")
    check_same(p("curve_a.csv"), p("curve_b.csv"), "train-toy curve")

    for tag in ("a", "b"):
        run(["evaluate", "--data", data, "--lang", "java",
             "--adv", p("accent_a.jsonl"), "--adapter", surrogate,
             "--out", p("report_%s.json" % tag), "--text", p("report_%s.txt" % tag)])
    check_same(p("report_a.json"), p("report_b.json"), "evaluate json")
    check_same(p("report_a.txt"), p("report_b.txt"), "evaluate text")

    # The toy model must be servable as an adapter.
    run(["evaluate", "--data", data, "--lang", "java",
         "--adv", p("accent_a.jsonl"), "--adapter", "builtin:toy:" + p("toy_a.model"),
         "--out", p("report_toy.json"), "--gen-length", "6"])

    report = json.load(open(p("report_a.json")))
    summary = report["summary"]
    expected = summary["relative_degradation"] * summary["valid_rate"] / 100.0
    if abs(summary["success_rate"] - expected) > 1e-9:
        failures.append("success rate is not degradation times validity")
    if summary["valid_rate"] != 100.0:
        failures.append("accent produced invalid programs")

    # Exit codes for the documented failure classes.
    run([], expect=2)
    run(["--help"], expect=0)
    run(["attack", "--data", data, "--lang", "java", "--adapter", surrogate,
         "--method", "hillclimb", "--out", p("x.jsonl")], expect=2)
    run(["attack", "--data", data, "--lang", "java", "--adapter", surrogate,
         "--method", "accent", "--out", p("x.jsonl")], expect=2)  # --embed missing
    run(["embed-train", "--data", p("missing.jsonl"), "--lang", "java",
         "--out", p("x.txt")], expect=2)
    empty = p("empty.jsonl")
    open(empty, "w").close()
    run(["evaluate", "--data", data, "--lang", "java", "--adv", empty,
         "--adapter", surrogate, "--out", p("x.json")], expect=4)
    ghost = p("ghost.jsonl")
    with open(ghost, "w") as f:
        f.write(json.dumps({"adv_code": SAMPLES[0][1], "comment": "c",
                            "original_id": "nope", "substitutions": []}) + "\n")
    run(["evaluate", "--data", data, "--lang", "java", "--adv", ghost,
         "--adapter", surrogate, "--out", p("x.json")], expect=5)
    run(["attack", "--data", data, "--lang", "java",
         "--adapter", "exec:/nonexistent-binary-xyz", "--method", "random",
         "--out", p("x.jsonl")], expect=3)
    run(["attack", "--data", data, "--lang", "java",
         "--adapter", "carrier-pigeon:coop", "--method", "random",
         "--out", p("x.jsonl")], expect=3)

    if failures:
        print("\n".join(failures))
        sys.exit(1)
    print("cli checks passed")


if __name__ == "__main__":
    main()
