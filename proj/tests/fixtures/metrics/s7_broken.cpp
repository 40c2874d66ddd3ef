int main() { return missing_symbol; }
