# Integration tests for spinbath
