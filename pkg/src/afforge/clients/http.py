"""HTTP clients for the three model services.

Wire protocol (UTF-8 JSON bodies):
  POST /v1/queries  {"images": [base64 PNG x5], "prompt_cfg": {...}}
                    -> {"object_class": str, "queries": [{"text", "affordance"} x5]}
  POST /v1/point    {"image": base64 PNG, "text": str, "max_points": int}
                    -> {"points": [{"u", "v", "confidence"}]}
  POST /v1/segment  {"image": base64 PNG, "points": [{"u", "v"}]}
                    -> {"logits": {"h", "w", "data": base64 LE float32 row-major}}

Retry policy: transport errors get 3 exponential-backoff retries, then the
call fails (the orchestrator records the cell as missing and fuses without
it); a response that parses but violates the contract gets exactly one
repeat request before MalformedResponseError.
"""

from __future__ import annotations

import os
import time
from typing import Mapping, Sequence

import httpx

from ..errors import (MalformedResponseError, ServiceTimeoutError,
                      ServiceUnreachableError)
from .base import (DEFAULT_MAX_POINTS, QUERIES_PER_OBJECT, build_queries,
                   filter_points)
from .codec import b64_of_bytes, f32_of_b64
from .types import AffordanceQuery, InteractionPoint, MaskLogits

ENV_QUERY_URL = "AFFORGE_QUERY_URL"
ENV_POINT_URL = "AFFORGE_POINT_URL"
ENV_SEGMENT_URL = "AFFORGE_SEGMENT_URL"

TRANSPORT_RETRIES = 3
PARSE_RETRIES = 1


class _ServiceClient:
    def __init__(self, url: str, timeout_s: float = 30.0,
                 backoff_s: float = 0.5, bearer_token: str | None = None,
                 http: httpx.Client | None = None):
        if not url:
            raise ValueError("service URL must be non-empty")
        self.url = url
        self.timeout_s = timeout_s
        self.backoff_s = backoff_s
        self._headers = {}
        if bearer_token:
            self._headers["Authorization"] = f"Bearer {bearer_token}"
        self._http = http if http is not None else httpx.Client()

    def _post_once(self, body: dict) -> dict:
        last = None
        for attempt in range(TRANSPORT_RETRIES + 1):
            if attempt:
                time.sleep(self.backoff_s * 2 ** (attempt - 1))
            try:
                resp = self._http.post(self.url, json=body,
                                       headers=self._headers,
                                       timeout=self.timeout_s)
            except httpx.TimeoutException as exc:
                last = exc
                continue
            except httpx.HTTPError as exc:
                last = exc
                continue
            if resp.status_code >= 500:
                last = MalformedResponseError(
                    f"{self.url}: server error {resp.status_code}")
                continue
            if resp.status_code != 200:
                raise MalformedResponseError(
                    f"{self.url}: unexpected status {resp.status_code}")
            try:
                return resp.json()
            except ValueError as exc:
                raise MalformedResponseError(f"{self.url}: non-JSON body") from exc
        if isinstance(last, httpx.TimeoutException):
            raise ServiceTimeoutError(f"{self.url}: timed out after retries") from last
        if isinstance(last, httpx.HTTPError):
            raise ServiceUnreachableError(f"{self.url}: {last}") from last
        raise ServiceUnreachableError(f"{self.url}: {last}")

    def _post_parsed(self, body: dict, parse):
        """POST and parse; a contract-violating body earns one repeat."""
        last_exc = None
        for _ in range(PARSE_RETRIES + 1):
            payload = self._post_once(body)
            try:
                return parse(payload)
            except (KeyError, TypeError, ValueError) as exc:
                last_exc = exc
        raise MalformedResponseError(
            f"{self.url}: contract-violating response ({last_exc})") from last_exc


class HttpQueryClient(_ServiceClient):
    def generate_queries(self, images: Sequence[bytes],
                         cfg: Mapping) -> list[AffordanceQuery]:
        if len(images) == 0:
            raise ValueError("generate_queries needs at least one view image")
        body = {"images": [b64_of_bytes(img) for img in images],
                "prompt_cfg": dict(cfg)}
        object_id = str(cfg.get("object_id", "object"))

        def parse(payload):
            cls = payload["object_class"]
            items = payload["queries"]
            if not isinstance(cls, str) or not cls:
                raise ValueError("empty object_class")
            if len(items) != QUERIES_PER_OBJECT:
                raise ValueError(f"expected {QUERIES_PER_OBJECT} queries, "
                                 f"got {len(items)}")
            pairs = []
            for item in items:
                text, phrase = item["text"], item["affordance"]
                if not text or not phrase:
                    raise ValueError("empty query fields")
                pairs.append((str(text), str(phrase)))
            return build_queries(object_id, cls, pairs)

        return self._post_parsed(body, parse)


class HttpPointClient(_ServiceClient):
    def __init__(self, url: str, max_points: int = DEFAULT_MAX_POINTS, **kw):
        super().__init__(url, **kw)
        self.max_points = max_points

    def point_at(self, image: bytes, query: AffordanceQuery, view_id: int,
                 width: int, height: int) -> list[InteractionPoint]:
        body = {"image": b64_of_bytes(image), "text": query.text,
                "max_points": self.max_points}

        def parse(payload):
            raw = [(float(p["u"]), float(p["v"]),
                    float(p.get("confidence", 1.0)))
                   for p in payload["points"]]
            return filter_points(raw, view_id, width, height, self.max_points)

        return self._post_parsed(body, parse)


class HttpSegmentClient(_ServiceClient):
    def segment_at(self, image: bytes, points: Sequence[InteractionPoint],
                   view_id: int) -> MaskLogits:
        if len(points) == 0:
            raise ValueError("segment_at needs at least one prompt point")
        body = {"image": b64_of_bytes(image),
                "points": [{"u": p.u, "v": p.v} for p in points]}

        def parse(payload):
            spec = payload["logits"]
            h, w = int(spec["h"]), int(spec["w"])
            if h < 1 or w < 1:
                raise ValueError("non-positive logit dimensions")
            flat = f32_of_b64(spec["data"], h * w)
            return MaskLogits(view_id=view_id, logits=flat.reshape(h, w))

        return self._post_parsed(body, parse)


def service_urls_from_env(default_query: str = "", default_point: str = "",
                          default_segment: str = "") -> tuple[str, str, str]:
    """Service endpoints: environment variables win over config defaults."""
    defaults = (default_query, default_point, default_segment)
    names = (ENV_QUERY_URL, ENV_POINT_URL, ENV_SEGMENT_URL)
    urls = tuple(os.environ.get(k, "") or d for k, d in zip(names, defaults))
    missing = [k for k, u in zip(names, urls) if not u]
    if missing:
        raise ValueError(f"service URLs not configured: {', '.join(missing)}")
    return urls
