"""Tests for autfa package."""
