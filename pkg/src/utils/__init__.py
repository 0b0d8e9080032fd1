from .data_loader import apply_overrides, load_config, parse_value
