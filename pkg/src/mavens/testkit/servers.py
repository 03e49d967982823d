"""Minimal local HTTP servers speaking the chat and embedding wire formats."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable


class _Server:
    def __init__(self, handler_fn: Callable[[str, dict], tuple[int, dict]]):
        self.requests: list[dict] = []
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):  # noqa: N802
                length = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(length) or b"{}")
                outer.requests.append({"path": self.path, "body": body})
                status, payload = handler_fn(self.path, body)
                data = json.dumps(payload).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def log_message(self, *args):
                pass

        self._httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}"

    def __enter__(self):
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._httpd.shutdown()
        self._httpd.server_close()


class FakeChatServer(_Server):
    """OpenAI-style ``/v1/chat/completions``; replies via ``reply_fn(system, user)``.

    The first ``fail_first`` requests get HTTP 503.
    """

    def __init__(self, reply_fn: Callable[[str, str], str], fail_first: int = 0):
        self.failures_left = fail_first

        def handle(path, body):
            if self.failures_left > 0:
                self.failures_left -= 1
                return 503, {"error": "unavailable"}
            msgs = {m["role"]: m["content"] for m in body.get("messages", [])}
            text = reply_fn(msgs.get("system", ""), msgs.get("user", ""))
            return 200, {"choices": [{"index": 0, "message": {"role": "assistant", "content": text}}]}

        super().__init__(handle)


class FakeEmbeddingServer(_Server):
    """``/v1/embeddings`` returning ``embed_fn(text)`` lists for every input."""

    def __init__(self, embed_fn: Callable[[str], list]):
        def handle(path, body):
            data = [{"index": i, "embedding": list(embed_fn(t))} for i, t in enumerate(body["input"])]
            return 200, {"data": data, "model": body.get("model")}

        super().__init__(handle)
