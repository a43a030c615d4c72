from .app import NOT_FOUND_CLOSE_CODE, StreamService, create_app, serve
from .registry import WIRE_KEYS, Subscription, SubscriptionRegistry, serialize_batch

__all__ = [
    "NOT_FOUND_CLOSE_CODE",
    "StreamService",
    "create_app",
    "serve",
    "WIRE_KEYS",
    "Subscription",
    "SubscriptionRegistry",
    "serialize_batch",
]
