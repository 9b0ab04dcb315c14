"""Class numbers h(-d) for squarefree d <= 200 from the analytic class number formula.

h(D) = -(1/|D|) * sum_{a=1}^{|D|-1} chi_D(a) * a, times w/2 for D = -3, -4,
where D is the fundamental discriminant of Q(sqrt(-d)) and chi_D the Kronecker symbol.
"""
from math import gcd


def kronecker(D, n):
    if n == 0:
        return 1 if abs(D) == 1 else 0
    result = 1
    while n % 2 == 0:
        n //= 2
        if D % 2 == 0:
            return 0
        result *= 1 if D % 8 in (1, 7) else -1
    # Jacobi symbol (D / n) for odd n > 0.
    a, m = D % n, n
    while a:
        while a % 2 == 0:
            a //= 2
            if m % 8 in (3, 5):
                result = -result
        a, m = m, a
        if a % 4 == 3 and m % 4 == 3:
            result = -result
        a %= m
    return result if m == 1 else 0


def squarefree(d):
    f = 2
    while f * f <= d:
        if d % (f * f) == 0:
            return False
        f += 1
    return True


def class_number(d):
    D = -d if d % 4 == 3 else -4 * d
    s = sum(kronecker(D, a) * a for a in range(1, -D) if gcd(a, -D) == 1)
    w = {-3: 6, -4: 4}.get(D, 2)
    h, r = divmod(-s * w, 2 * -D)
    assert r == 0
    return h


print("d,h")
for d in range(1, 201):
    if squarefree(d):
        print(f"{d},{class_number(d)}")
