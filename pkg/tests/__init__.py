"""Test suite for the qdturnstile package."""
