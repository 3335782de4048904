"""Performance and benchmark tests."""
