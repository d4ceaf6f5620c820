"""Shared services."""

from src.services.csv_service import CSVService
