# Spanner construction, verification and certification library
