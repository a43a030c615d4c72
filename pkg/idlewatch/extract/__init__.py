from .decode import DecodedFeed, decode_feed, parse_feed_message
from .poller import USER_AGENT, fetch_source, poll_once, poll_region

__all__ = ["DecodedFeed", "decode_feed", "parse_feed_message", "USER_AGENT", "fetch_source", "poll_once", "poll_region"]
