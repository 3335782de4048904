"""Test utilities and helpers."""
