"""Minimal stand-in for the sandbox worker: NDJSON requests on stdin, one
result line per request on stdout. Code runs via exec() in a fresh namespace.

A few magic first lines drive the client's failure paths:
  #hang      never reply
  #exit      exit without replying
  #wrong-id  reply with a different id
  #garbage   reply with a line that is not JSON
"""
import contextlib
import io
import json
import sys
import time
import traceback

MARKER = "\n[truncated]"


def cap(text, limit):
    data = text.encode()
    if len(data) <= limit:
        return text
    return data[:limit].decode(errors="ignore") + MARKER


def run(req):
    code = req["code"]
    first = code.split("\n", 1)[0].strip()
    if first == "#hang":
        time.sleep(3600)
    if first == "#exit":
        sys.exit(0)
    if first == "#garbage":
        return "this is not json"
    out, err = io.StringIO(), io.StringIO()
    status = "ok"
    start = time.monotonic()
    namespace = {"header": req["table"]["header"], "rows": req["table"]["rows"]}
    try:
        with contextlib.redirect_stdout(out):
            exec(code, namespace)
    except Exception:
        status = "error"
        err.write(traceback.format_exc())
    limit = req["max_output_bytes"]
    result = {
        "id": "someone-else" if first == "#wrong-id" else req["id"],
        "status": status,
        "stdout": cap(out.getvalue(), limit),
        "stderr": cap(err.getvalue(), limit),
        "duration_ms": int((time.monotonic() - start) * 1000),
    }
    return json.dumps(result)


def main():
    for line in sys.stdin:
        if not line.strip():
            continue
        reply = run(json.loads(line))
        sys.stdout.write(reply + "\n")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
