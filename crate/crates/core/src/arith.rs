//! Small-integer number theory: primality, factorization, modular powers,
//! primitive roots and primes in arithmetic progressions.

pub fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u128, b: u128) -> u128 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse modulo a prime.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller–Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization as (prime, exponent) pairs in increasing order.
pub fn factorize(mut n: u128) -> Vec<(u128, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut push = |p: u128, n: &mut u128| {
        let mut e = 0;
        while *n % p == 0 {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut p = 5u128;
    while p * p <= n {
        if n < u64::MAX as u128 && is_prime(n as u64) {
            break;
        }
        push(p, &mut n);
        push(p + 2, &mut n);
        p += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u128) -> Vec<u128> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// True when `n` is a positive power of `p` or equal to 1.
pub fn is_power_of(mut n: u128, p: u128) -> bool {
    if n == 0 {
        return false;
    }
    while n % p == 0 {
        n /= p;
    }
    n == 1
}

/// The largest power of `p` dividing `n`.
pub fn p_part(mut n: u128, p: u128) -> u128 {
    let mut acc = 1;
    if n == 0 {
        return 0;
    }
    while n % p == 0 {
        n /= p;
        acc *= p;
    }
    acc
}

/// Least primitive root modulo the prime `p`.
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let factors = prime_divisors((p - 1) as u128);
    (2..p)
        .find(|&g| factors.iter().all(|&f| pow_mod(g, (p - 1) / f as u64, p) != 1))
        .expect("prime modulus has a primitive root")
}

/// Least prime `l > lower` with `l ≡ 1 (mod modulus)`.
pub fn prime_one_mod(modulus: u64, lower: u64) -> u64 {
    let mut l = (lower / modulus + 1) * modulus + 1;
    while !is_prime(l) {
        l += modulus;
    }
    l
}

/// Integer square root (floor).
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Symmetric residue of `x` modulo `m`, in `(-m/2, m/2]`.
pub fn symmetric(x: u128, m: u128) -> i128 {
    let x = x % m;
    if x > m / 2 {
        x as i128 - m as i128
    } else {
        x as i128
    }
}

/// Chinese remaindering of two residues modulo coprime `m1`, `m2`, returning
/// the symmetric representative modulo `m1*m2`.
pub fn crt2(r1: u64, m1: u64, r2: u64, m2: u64) -> i128 {
    let m1i = m1 as u128;
    let m2i = m2 as u128;
    let inv = inv_mod(m1 % m2, m2) as u128;
    let diff = (r2 as u128 + m2i - (r1 as u128 % m2i)) % m2i;
    let t = diff * inv % m2i;
    let x = r1 as u128 + m1i * t;
    symmetric(x, m1i * m2i)
}
