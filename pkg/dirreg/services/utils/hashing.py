import hashlib


def instance_digest(content: bytes) -> str:
    return hashlib.sha256(content).hexdigest()


def seed_from_digest(digest: str) -> int:
    """Sampling seed from the first 8 hex digits of the digest."""
    return int(digest[:8], 16)
