#!/usr/bin/env python3
"""Sphere evaluator speaking the nawoa-extobj line protocol.

Reads {"id": n, "x": [...]} per line on stdin and answers
{"id": n, "fitness": sum(x_i^2)} on stdout.
"""
import json
import math
import sys


def main() -> None:
    out = sys.stdout
    out.write(json.dumps({"protocol": "nawoa-extobj", "version": 1}) + "\n")
    out.flush()
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        req_id = 0
        try:
            req = json.loads(line)
            req_id = int(req["id"])
            x = [float(v) for v in req["x"]]
            fitness = 0.0
            for v in x:
                fitness += v * v
            if not math.isfinite(fitness):
                raise ValueError("non-finite fitness")
            resp = {"id": req_id, "fitness": fitness}
        except (ValueError, KeyError, TypeError) as exc:
            resp = {"id": req_id, "error": f"malformed request: {exc}"}
        out.write(json.dumps(resp) + "\n")
        out.flush()


if __name__ == "__main__":
    main()
