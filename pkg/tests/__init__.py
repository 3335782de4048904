"""Tests for Live VLM WebUI."""
