# Model tests module
