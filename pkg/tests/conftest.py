from hypothesis import settings

# brute-force oracles make single examples slow; timing is not what we test
settings.register_profile("default", deadline=None)
settings.load_profile("default")
