from src.data.cpc18 import parse_cpc18
from src.data.generic_csv import parse_generic_csv, to_records, write_generic_csv
