#!/usr/bin/env python3
"""Line-protocol model stub for adapter tests.

Reads {"id": n, "code": s} lines, answers {"id": n, "comment": s}. The
comment is a pure function of the code, so retransmits always get the same
answer. Fault flags simulate slow, broken or malicious servers.
"""
import argparse
import json
import socket
import sys
import threading
import time


def comment_for(code, mode):
    if mode == "const":
        return "fixed comment"
    words = []
    cur = []
    for ch in code:
        if ch.isalnum():
            cur.append(ch.lower())
        elif cur:
            words.append("".join(cur))
            cur = []
    if cur:
        words.append("".join(cur))
    seen = []
    for w in words:
        if w not in seen:
            seen.append(w)
    return " ".join(seen[:8])


class Server:
    def __init__(self, args, write):
        self.args = args
        self.write = write
        self.lock = threading.Lock()
        self.received = 0
        self.answered = 0
        self.batch = []

    def respond(self, req):
        rid = req["id"]
        if self.args.bad_id:
            rid = rid + 7777
        line = json.dumps({"id": rid, "comment": comment_for(req["code"], self.args.mode)})
        with self.lock:
            if self.args.garbage:
                self.write("this is not json\n")
            else:
                self.write(line + "\n")
            self.answered += 1
            if self.args.exit_after and self.answered >= self.args.exit_after:
                sys.stdout.flush()
                import os
                os._exit(0)

    def handle(self, line):
        line = line.strip()
        if not line:
            return
        req = json.loads(line)
        self.received += 1
        if self.received <= self.args.drop_first:
            return
        if self.args.delay_first and self.received == 1:
            t = threading.Thread(
                target=lambda: (time.sleep(self.args.delay_first / 1000.0), self.respond(req)),
                daemon=True)
            t.start()
            return
        if self.args.shuffle > 1:
            self.batch.append(req)
            if len(self.batch) >= self.args.shuffle:
                for r in reversed(self.batch):
                    self.respond(r)
                self.batch = []
            return
        self.respond(req)


def serve_stdio(args):
    def write(text):
        sys.stdout.write(text)
        sys.stdout.flush()

    server = Server(args, write)
    for line in sys.stdin:
        server.handle(line)


def serve_tcp(args):
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    sock.bind(("127.0.0.1", 0))
    sock.listen(1)
    with open(args.tcp, "w") as f:
        f.write("%d\n" % sock.getsockname()[1])
    conn, _ = sock.accept()
    wfile = conn.makefile("w")

    def write(text):
        wfile.write(text)
        wfile.flush()

    server = Server(args, write)
    for line in conn.makefile("r"):
        server.handle(line)
    conn.close()


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--mode", choices=["words", "const"], default="words")
    ap.add_argument("--shuffle", type=int, default=1,
                    help="answer in reverse order within groups of N")
    ap.add_argument("--drop-first", type=int, default=0,
                    help="never answer the first N received requests")
    ap.add_argument("--delay-first", type=int, default=0,
                    help="answer the first request only after N ms")
    ap.add_argument("--exit-after", type=int, default=0,
                    help="exit abruptly after N answers")
    ap.add_argument("--bad-id", action="store_true",
                    help="answer with a wrong request id")
    ap.add_argument("--garbage", action="store_true",
                    help="answer with a non-JSON line")
    ap.add_argument("--tcp", metavar="PORTFILE", default="",
                    help="serve one TCP connection; write the port to PORTFILE")
    args = ap.parse_args()
    if args.tcp:
        serve_tcp(args)
    else:
        serve_stdio(args)


if __name__ == "__main__":
    main()
