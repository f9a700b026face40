"""Pydantic schemas for experiment configs, run payloads and result records."""
