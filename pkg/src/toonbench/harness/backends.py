"""Model backends: recorded replay and OpenAI-compatible chat completions over HTTP."""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import httpx

from ..formats import FormatKind
from .corpus import TaskInstance
from .records import GenerationRecord, read_records, utc_now

log = logging.getLogger(__name__)


class BackendError(RuntimeError):
    def __init__(self, message: str, attempts: Optional[List[str]] = None):
        self.attempts = attempts or []
        detail = "; ".join(self.attempts)
        super().__init__(f"{message} ({detail})" if detail else message)


class ReplayMiss(LookupError):
    pass


@dataclass
class Generation:
    """What a backend returns for one prompt."""

    output_text: str
    n_tokens: int
    duration_s: float
    duration_mode: str
    timestamp: str
    energy_kwh: Optional[float] = None
    ce_kg: Optional[float] = None
    failed: bool = False
    error: Optional[str] = None
    sampling: Dict[str, Any] = field(default_factory=dict)


class ReplayBackend:
    """Serve stored outputs and measurements from a record file."""

    def __init__(self, records: List[GenerationRecord]):
        self._by_key: Dict[Tuple[str, str, FormatKind], GenerationRecord] = {}
        for r in records:
            self._by_key[r.key] = r
        self.model_ids = sorted({r.model_id for r in records})

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ReplayBackend":
        return cls(read_records(path))

    def generate(self, instance: TaskInstance, model_id: str, format: FormatKind, prompt: str) -> Generation:
        rec = self._by_key.get((instance.instance_id, model_id, format))
        if rec is None:
            raise ReplayMiss(
                f"replay file has no output for instance {instance.instance_id!r}, "
                f"model {model_id!r}, format {format.value}"
            )
        m = rec.measurement
        return Generation(
            output_text=rec.output_text,
            n_tokens=m.n_tokens,
            duration_s=m.duration_s,
            duration_mode=rec.duration_mode,
            timestamp=rec.timestamp,
            energy_kwh=m.energy_kwh,
            ce_kg=m.ce_kg,
            failed=rec.failed,
            sampling=dict(rec.sampling),
        )


def chat_completions_url(base: str) -> str:
    base = base.rstrip("/")
    return base if base.endswith("/chat/completions") else base + "/chat/completions"


class HttpBackend:
    """OpenAI-compatible ``/chat/completions`` client.

    Transport errors, 429 and 5xx responses are retried with exponential
    backoff up to ``max_attempts`` tries, then raise :class:`BackendError`.
    Other client errors and malformed bodies yield a failed generation.
    """

    def __init__(
        self,
        url: str,
        *,
        api_key: Optional[str] = None,
        sampling: Optional[Dict[str, Any]] = None,
        stream: bool = False,
        timeout_s: float = 120.0,
        max_attempts: int = 3,
        backoff_s: float = 1.0,
        transport: Optional[httpx.BaseTransport] = None,
        sleep: Callable[[float], None] = time.sleep,
        clock: Callable[[], float] = time.perf_counter,
    ):
        headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self.url = chat_completions_url(url)
        self.sampling = {"temperature": 0.0, **(sampling or {})}
        self.stream = stream
        self.max_attempts = max(1, max_attempts)
        self.backoff_s = backoff_s
        self._sleep = sleep
        self._clock = clock
        self._client = httpx.Client(timeout=timeout_s, headers=headers, transport=transport)

    def close(self):
        self._client.close()

    def _body(self, model_id: str, prompt: str) -> Dict[str, Any]:
        body = {"model": model_id, "messages": [{"role": "user", "content": prompt}], **self.sampling}
        if self.stream:
            body["stream"] = True
            body["stream_options"] = {"include_usage": True}
        return body

    def generate(self, instance: TaskInstance, model_id: str, format: FormatKind, prompt: str) -> Generation:
        attempts: List[str] = []
        for attempt in range(1, self.max_attempts + 1):
            if attempt > 1:
                self._sleep(self.backoff_s * 2 ** (attempt - 2))
            try:
                if self.stream:
                    return self._streamed(model_id, prompt)
                return self._roundtrip(model_id, prompt)
            except _Retryable as exc:
                attempts.append(f"attempt {attempt}: {exc}")
                log.warning("backend attempt %d for %s/%s failed: %s", attempt, instance.instance_id, format.value, exc)
        raise BackendError(f"backend failed after {self.max_attempts} attempts", attempts)

    def _post(self, body: Dict[str, Any]) -> httpx.Response:
        try:
            return self._client.post(self.url, json=body)
        except httpx.TransportError as exc:
            raise _Retryable(f"{type(exc).__name__}: {exc}") from exc

    def _failed(self, start: float, message: str) -> Generation:
        return Generation(
            output_text="",
            n_tokens=0,
            duration_s=self._clock() - start,
            duration_mode="roundtrip",
            timestamp=utc_now(),
            failed=True,
            error=message,
            sampling=dict(self.sampling),
        )

    def _roundtrip(self, model_id: str, prompt: str) -> Generation:
        start = self._clock()
        resp = self._post(self._body(model_id, prompt))
        elapsed = self._clock() - start
        _raise_retryable(resp)
        if resp.status_code >= 400:
            return self._failed(start, f"HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            data = resp.json()
            content = data["choices"][0]["message"]["content"]
            n_tokens = int(data["usage"]["completion_tokens"])
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            return self._failed(start, f"malformed response: {exc!r}")
        if not isinstance(content, str):
            return self._failed(start, "response has no text content")
        return Generation(
            output_text=content,
            n_tokens=n_tokens,
            duration_s=elapsed,
            duration_mode="roundtrip",
            timestamp=utc_now(),
            sampling=dict(self.sampling),
        )

    def _streamed(self, model_id: str, prompt: str) -> Generation:
        start = self._clock()
        body = self._body(model_id, prompt)
        try:
            with self._client.stream("POST", self.url, json=body) as resp:
                _raise_retryable(resp)
                if resp.status_code >= 400:
                    resp.read()
                    return self._failed(start, f"HTTP {resp.status_code}: {resp.text[:200]}")
                pieces: List[str] = []
                first = last = None
                chunks = 0
                usage_tokens = None
                for line in resp.iter_lines():
                    if not line.startswith("data:"):
                        continue
                    payload = line[5:].strip()
                    if payload == "[DONE]":
                        break
                    try:
                        chunk = json.loads(payload)
                    except json.JSONDecodeError:
                        continue
                    if chunk.get("usage"):
                        usage_tokens = chunk["usage"].get("completion_tokens", usage_tokens)
                    for choice in chunk.get("choices") or []:
                        text = (choice.get("delta") or {}).get("content")
                        if text:
                            now = self._clock()
                            first = now if first is None else first
                            last = now
                            chunks += 1
                            pieces.append(text)
        except httpx.TransportError as exc:
            raise _Retryable(f"{type(exc).__name__}: {exc}") from exc
        if first is None:
            return self._failed(start, "stream carried no content")
        return Generation(
            output_text="".join(pieces),
            n_tokens=int(usage_tokens) if usage_tokens is not None else chunks,
            duration_s=last - first,
            duration_mode="decode",
            timestamp=utc_now(),
            sampling=dict(self.sampling),
        )


class _Retryable(Exception):
    pass


def _raise_retryable(resp: httpx.Response):
    if resp.status_code == 429 or resp.status_code >= 500:
        raise _Retryable(f"HTTP {resp.status_code}")
