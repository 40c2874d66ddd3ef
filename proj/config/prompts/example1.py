import json
import random


def generate_test_inputs():
    test_case_list = []
    for _ in range(80):
        n = random.randint(1, 100000)
        values = [random.randint(1, 10**9) for _ in range(n)]
        test_case_list.append(f"{n}\n{' '.join(map(str, values))}\n")
    return test_case_list


print(json.dumps(generate_test_inputs()))
