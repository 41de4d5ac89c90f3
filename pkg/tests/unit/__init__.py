# Unit tests for spinbath
