import json
import random


def generate_test_inputs():
    test_case_list = []
    for _ in range(80):
        t = random.randint(1, 10)
        lines = [str(t)]
        for _ in range(t):
            n = random.randint(1, 10000)
            lines.append(str(n))
            lines.append(" ".join(str(random.randint(1, 10**9)) for _ in range(n)))
        test_case_list.append("\n".join(lines) + "\n")
    return test_case_list


print(json.dumps(generate_test_inputs()))
