"""Command-line transport: file formats, command handlers and SVG output."""
