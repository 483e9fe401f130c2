"""Operational surface: report rendering, HTTP API, CLI."""
