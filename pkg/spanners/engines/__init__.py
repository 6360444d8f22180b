# Build, verify and certify engines
