// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "progen.hpp"

#include <functional>
#include <random>
#include <sstream>

namespace llbc::testing {

namespace {

struct Rng {
  std::mt19937_64 g;
  explicit Rng(uint64_t s) : g(s) {}
  int64_t range(int64_t lo, int64_t hi) { return std::uniform_int_distribution<int64_t>(lo, hi)(g); }
  bool coin() { return range(0, 1) == 1; }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<size_t>(range(0, static_cast<int64_t>(v.size()) - 1))];
  }
};

std::string lit(int64_t n) { return std::to_string(n); }

const char* kHeader = "// generated\n";

// Straight-line checked arithmetic, with an occasional branch. May panic on
// overflow or division by zero.
std::string arith(Rng& r) {
  std::ostringstream o;
  bool u = r.coin();
  std::string ty = u ? "u32" : "i32";
  int steps = static_cast<int>(r.range(2, 6));
  o << kHeader << "fn f(a: " << ty << ", b: " << ty << ") -> (ret: " << ty << ") {\n  locals { c: bool";
  for (int i = 0; i < steps; ++i) o << ", t" << i << ": " << ty;
  o << " }\n";
  std::vector<std::string> ops = {"+", "-", "*", "/", "%"};
  o << "  t0 = copy a " << r.pick(ops) << " copy b;\n";
  for (int i = 1; i < steps; ++i) {
    std::string op = r.pick(ops);
    int64_t k = op == "*" ? r.range(u ? 0 : -3000, 3000) : r.range(u ? 0 : -40, 40);
    if (r.range(0, 3) == 0) {
      o << "  c = copy t" << i - 1 << " < " << lit(r.range(u ? 0 : -20, 60)) << ";\n";
      o << "  if move c {\n    t" << i << " = copy t" << i - 1 << " " << op << " " << lit(k) << ";\n  } else {\n"
        << "    t" << i << " = copy t" << i - 1 << " + copy a;\n  }\n";
    } else {
      o << "  t" << i << " = move t" << i - 1 << " " << op << " " << lit(k) << ";\n";
    }
  }
  o << "  ret = move t" << steps - 1 << ";\n  return;\n}\n\n";
  o << "fn main() -> (ret: " << ty << ") {\n  ret = f(" << lit(r.range(u ? 0 : -100, 100)) << ", "
    << lit(r.range(u ? 0 : -10, 10)) << ");\n  return;\n}\n";
  return o.str();
}

// A chain of updates through a mutable borrow and its reborrows.
std::string mut_chain(Rng& r) {
  std::ostringstream o;
  o << kHeader << "fn upd<'a>(x: &'a mut i32, k: i32) {\n  *x = copy *x + move k;\n  return;\n}\n\n";
  o << "fn main() -> (ret: i32) {\n  locals { v: i32, w: i32, p: &mut i32, q: &mut i32, u: () }\n";
  o << "  v = " << lit(r.range(-50, 50)) << ";\n  w = 0;\n  p = &mut v;\n";
  int steps = static_cast<int>(r.range(2, 6));
  for (int i = 0; i < steps; ++i) {
    switch (r.range(0, 3)) {
    case 0: o << "  q = &mut *p;\n  u = upd::<'_>(move q, " << lit(r.range(-20, 20)) << ");\n"; break;
    case 1: o << "  *p = copy *p * " << lit(r.range(-3, 3)) << ";\n"; break;
    case 2: o << "  q = &mut *p;\n  *q = copy *q - " << lit(r.range(-9, 9)) << ";\n"; break;
    default: o << "  w = copy *p;\n  u = upd::<'_>(move p, move w);\n  p = &mut v;\n"; break;
    }
  }
  o << "  ret = copy v;\n  return;\n}\n";
  return o.str();
}

std::string choose(Rng& r) {
  std::ostringstream o;
  o << kHeader << "fn choose<'a, T>(b: bool, x: &'a mut T, y: &'a mut T) -> (ret: &'a mut T) {\n"
    << "  if move b {\n    ret = move x;\n  } else {\n    ret = move y;\n  }\n  return;\n}\n\n";
  o << "fn main() -> (ret: (i32, i32)) {\n"
    << "  locals { x: i32, y: i32, px: &mut i32, py: &mut i32, z: &mut i32 }\n";
  o << "  x = " << lit(r.range(-9, 9)) << ";\n  y = " << lit(r.range(-9, 9)) << ";\n";
  o << "  px = &mut x;\n  py = &mut y;\n";
  o << "  z = choose::<'_, i32>(" << (r.coin() ? "true" : "false") << ", move px, move py);\n";
  o << "  *z = copy *z + " << lit(r.range(-100, 100)) << ";\n";
  if (r.coin()) o << "  *z = copy *z * " << lit(r.range(-5, 5)) << ";\n";
  o << "  ret = (copy x, copy y);\n  return;\n}\n";
  return o.str();
}

// Several shared borrows and shared reborrows of the same place.
std::string shared(Rng& r) {
  std::ostringstream o;
  o << kHeader << "fn add_both<'a, 'b>(x: &'a i32, y: &'b i32) -> (ret: i32) {\n"
    << "  ret = copy *x + copy *y;\n  return;\n}\n\n";
  o << "fn main() -> (ret: i32) {\n  locals { a: i32, b: i32, s1: &i32, s2: &i32, s3: &i32, n: i32 }\n";
  o << "  a = " << lit(r.range(-1000, 1000)) << ";\n  b = " << lit(r.range(-1000, 1000)) << ";\n";
  o << "  s1 = &a;\n";
  o << (r.coin() ? "  s2 = &a;\n" : "  s2 = &b;\n");
  o << "  s3 = &*s1;\n";
  o << "  n = add_both::<'_, '_>(move s2, move s3);\n";
  o << "  ret = move n " << (r.coin() ? "+" : "-") << " copy *s1;\n  return;\n}\n";
  return o.str();
}

// Two-phase borrow: the receiver is reserved before the argument is computed.
std::string reserved(Rng& r) {
  std::ostringstream o;
  int fld = static_cast<int>(r.range(0, 1));
  o << kHeader << "fn get<'a>(p: &'a (i32, i32)) -> (ret: i32) {\n  ret = copy (*p)." << fld
    << ";\n  return;\n}\n\n";
  o << "fn apply<'a>(p: &'a mut (i32, i32), n: i32) {\n  (*p).1 = copy (*p).1 " << (r.coin() ? "+" : "*")
    << " move n;\n  (*p).0 = copy (*p).0 - 1;\n  return;\n}\n\n";
  o << "fn main() -> (ret: (i32, i32)) {\n  locals { p: (i32, i32), m: &mut (i32, i32), s: &(i32, i32), n: i32, u: () }\n";
  o << "  p = (" << lit(r.range(-500, 500)) << ", " << lit(r.range(-500, 500)) << ");\n";
  o << "  m = &reserved p;\n  s = &p;\n  n = get::<'_>(move s);\n  u = apply::<'_>(move m, move n);\n";
  o << "  ret = move p;\n  return;\n}\n";
  return o.str();
}

std::string boxed(Rng& r) {
  std::ostringstream o;
  o << kHeader << "fn upd<'a>(x: &'a mut i32, k: i32) {\n  *x = copy *x * move k;\n  return;\n}\n\n";
  o << "fn main() -> (ret: i32) {\n  locals { bx: Box<i32>, b2: Box<(i32, i32)>, p: &mut i32, u: () }\n";
  o << "  bx = Box::new(" << lit(r.range(-30, 30)) << ");\n";
  o << "  *bx = copy *bx + " << lit(r.range(-30, 30)) << ";\n";
  o << "  p = &mut *bx;\n  u = upd::<'_>(move p, " << lit(r.range(-4000, 4000)) << ");\n";
  o << "  b2 = Box::new((copy *bx, " << lit(r.range(-9, 9)) << "));\n";
  o << "  p = &mut (*b2).1;\n  *p = copy *p + " << lit(r.range(-9, 9)) << ";\n";
  o << "  ret = copy (*b2).0 - copy (*b2).1;\n  return;\n}\n";
  return o.str();
}

std::string list_decls() {
  return "enum List<T> {\n  Cons(T, Box<List<T>>),\n  Nil,\n}\n\n"
         "fn list_nth_mut<'a, T>(l: &'a mut List<T>, i: u32) -> (ret: &'a mut T) {\n"
         "  locals { tl: &'a mut List<T>, i1: u32, b: bool }\n"
         "  match *l {\n    Cons(x, tl) => {\n      b = copy i == 0;\n      if move b {\n"
         "        ret = &mut (*l).Cons.0;\n      } else {\n        tl = &mut *(*l).Cons.1;\n"
         "        i1 = copy i - 1;\n        ret = list_nth_mut::<'a, T>(move tl, move i1);\n      }\n    }\n"
         "    Nil => {\n      panic!();\n    }\n  }\n  return;\n}\n\n"
         "fn sum<'a>(l: &'a List<i32>) -> (ret: i32) {\n  locals { tl: &'a List<i32>, s: i32 }\n"
         "  match *l {\n    Cons(x, tl) => {\n      tl = &*(*l).Cons.1;\n      s = sum::<'a>(move tl);\n"
         "      ret = copy (*l).Cons.0 + move s;\n    }\n    Nil => {\n      ret = 0;\n    }\n  }\n  return;\n}\n\n";
}

std::string list_lit(Rng& r, int n) {
  std::string s = "Nil";
  for (int i = 0; i < n; ++i) s = "Cons(" + lit(r.range(-50, 50)) + ", Box::new(" + s + "))";
  return s;
}

// list_nth_mut with a possibly out-of-range index, then sum.
std::string list_nth(Rng& r) {
  std::ostringstream o;
  int n = static_cast<int>(r.range(0, 6));
  o << kHeader << list_decls();
  o << "fn main() -> (ret: i32) {\n  locals { l: List<i32>, x: &mut i32, pl: &mut List<i32>, sl: &List<i32> }\n";
  o << "  l = " << list_lit(r, n) << ";\n";
  int rounds = static_cast<int>(r.range(1, 2));
  for (int k = 0; k < rounds; ++k) {
    o << "  pl = &mut l;\n  x = list_nth_mut::<'_, i32>(move pl, " << r.range(0, n) << ");\n";
    o << "  *x = copy *x + " << lit(r.range(-100, 100)) << ";\n";
  }
  o << "  sl = &l;\n  ret = sum::<'_>(move sl);\n  return;\n}\n";
  return o.str();
}

// Recursion on integers; large inputs overflow.
std::string recursion(Rng& r) {
  std::ostringstream o;
  int which = static_cast<int>(r.range(0, 2));
  o << kHeader;
  if (which == 0) {
    o << "fn fact(n: u32) -> (ret: u32) {\n  locals { c: bool, m: u32, t: u32 }\n  c = copy n == 0;\n"
      << "  if move c {\n    ret = 1;\n  } else {\n    m = copy n - 1;\n    t = fact(move m);\n"
      << "    ret = copy n * move t;\n  }\n  return;\n}\n\n";
    o << "fn main() -> (ret: u32) {\n  ret = fact(" << r.range(0, 15) << ");\n  return;\n}\n";
  } else if (which == 1) {
    o << "fn fib(n: u32) -> (ret: u32) {\n  locals { c: bool, m: u32, k: u32, a: u32, b: u32 }\n  c = copy n < 2;\n"
      << "  if move c {\n    ret = copy n;\n  } else {\n    m = copy n - 1;\n    k = copy n - 2;\n"
      << "    a = fib(move m);\n    b = fib(move k);\n    ret = move a + move b;\n  }\n  return;\n}\n\n";
    o << "fn main() -> (ret: u32) {\n  ret = fib(" << r.range(0, 12) << ");\n  return;\n}\n";
  } else {
    o << "fn acc<'a>(x: &'a mut i32, n: u32) {\n  locals { c: bool, m: u32, px: &'a mut i32, u: () }\n  c = copy n == 0;\n"
      << "  if move c {\n    return;\n  } else {\n    *x = copy *x * 2;\n    m = copy n - 1;\n"
      << "    px = &mut *x;\n    u = acc::<'a>(move px, move m);\n  }\n  return;\n}\n\n";
    o << "fn main() -> (ret: i32) {\n  locals { v: i32, p: &mut i32, u: () }\n  v = " << lit(r.range(-5, 5))
      << ";\n  p = &mut v;\n  u = acc::<'_>(move p, " << r.range(0, 33) << ");\n  ret = copy v;\n  return;\n}\n";
  }
  return o.str();
}

// Disjoint mutable borrows of two struct fields.
std::string fields(Rng& r) {
  std::ostringstream o;
  o << kHeader << "struct Pt {\n  x: i32,\n  y: i32,\n}\n\n";
  o << "fn scale<'a>(p: &'a mut i32, k: i32) {\n  *p = copy *p * move k;\n  return;\n}\n\n";
  o << "fn main() -> (ret: i32) {\n  locals { s: Pt, px: &mut i32, py: &mut i32, u: () }\n";
  o << "  s = Pt(" << lit(r.range(-99, 99)) << ", " << lit(r.range(-99, 99)) << ");\n";
  o << "  px = &mut s.Pt.x;\n  py = &mut s.Pt.y;\n";
  if (r.coin()) {
    o << "  u = scale::<'_>(move py, " << lit(r.range(-9, 9)) << ");\n  u = scale::<'_>(move px, "
      << lit(r.range(-9, 9)) << ");\n";
  } else {
    o << "  u = scale::<'_>(move px, " << lit(r.range(-9, 9)) << ");\n  *py = copy *py + 1;\n";
  }
  o << "  ret = copy s.Pt.x - copy s.Pt.y;\n  return;\n}\n";
  return o.str();
}

// Swap of borrows living in two regions.
std::string swap(Rng& r) {
  std::ostringstream o;
  o << kHeader << "fn swap<'a, 'b>(z: (&'a mut u32, &'b mut u32)) -> (ret: (&'b mut u32, &'a mut u32)) {\n"
    << "  ret = (move z.1, move z.0);\n  return;\n}\n\n";
  o << "fn main() -> (ret: (u32, u32)) {\n  locals { x: u32, y: u32, px: &mut u32, py: &mut u32, z: (&mut u32, "
       "&mut u32), s: (&mut u32, &mut u32) }\n";
  o << "  x = " << r.range(0, 50) << ";\n  y = " << r.range(0, 50) << ";\n";
  o << "  px = &mut x;\n  py = &mut y;\n  z = (move px, move py);\n  s = swap::<'_, '_>(move z);\n";
  o << "  *s.0 = copy *s.0 - " << r.range(0, 60) << ";\n";
  o << "  *s.1 = copy *s.1 + " << r.range(0, 60) << ";\n";
  o << "  ret = (copy x, copy y);\n  return;\n}\n";
  return o.str();
}

// Matching on an enum behind a mutable borrow, writing a variant field.
std::string option(Rng& r) {
  std::ostringstream o;
  o << kHeader << "enum Opt {\n  Some(i32),\n  None,\n}\n\n";
  o << "fn bump<'a>(o: &'a mut Opt, d: i32) -> (ret: i32) {\n  match *o {\n    Some(v) => {\n"
    << "      (*o).Some.0 = copy (*o).Some.0 + " << lit(r.range(-9, 9)) << ";\n      ret = copy (*o).Some.0;\n"
    << "    }\n    None => {\n      *o = Some(copy d);\n      ret = move d;\n    }\n  }\n  return;\n}\n\n";
  o << "fn main() -> (ret: (i32, Opt)) {\n  locals { o: Opt, p: &mut Opt, r1: i32, r2: i32, m: i32 }\n";
  o << "  o = " << (r.coin() ? "None" : "Some(" + lit(r.range(-9, 9)) + ")") << ";\n";
  o << "  p = &mut o;\n  r1 = bump::<'_>(move p, " << lit(r.range(-9, 9)) << ");\n";
  o << "  p = &mut o;\n  r2 = bump::<'_>(move p, 0);\n";
  o << "  m = move r1 * move r2;\n  ret = (move m, move o);\n  return;\n}\n";
  return o.str();
}

// A borrow into a suffix of a list returned from a recursive search.
std::string suffix(Rng& r) {
  std::ostringstream o;
  int n = static_cast<int>(r.range(0, 5));
  o << kHeader << "enum List<T> {\n  Cons(T, Box<List<T>>),\n  Nil,\n}\n\n";
  o << "fn find<'a>(ls: &'a mut List<i32>, x: i32) -> (ret: &'a mut List<i32>) {\n"
    << "  locals { tl: &'a mut List<i32>, b: bool }\n  match *ls {\n    Nil => {\n      ret = move ls;\n    }\n"
    << "    Cons(hd, tl) => {\n      b = copy (*ls).Cons.0 == copy x;\n      if move b {\n        ret = move ls;\n"
    << "      } else {\n        tl = &mut *(*ls).Cons.1;\n        ret = find::<'a>(move tl, move x);\n      }\n"
    << "    }\n  }\n  return;\n}\n\n";
  o << "fn main() -> (ret: List<i32>) {\n  locals { l: List<i32>, pl: &mut List<i32>, r: &mut List<i32> }\n";
  std::string s = "Nil";
  for (int i = 0; i < n; ++i) s = "Cons(" + lit(r.range(0, 4)) + ", Box::new(" + s + "))";
  o << "  l = " << s << ";\n  pl = &mut l;\n  r = find::<'_>(move pl, " << r.range(0, 4) << ");\n";
  o << (r.coin() ? "  *r = Nil;\n" : "  *r = Cons(" + lit(r.range(10, 20)) + ", Box::new(Nil));\n");
  o << "  ret = move l;\n  return;\n}\n";
  return o.str();
}

// A borrow of a tuple component returned through a function.
std::string project(Rng& r) {
  std::ostringstream o;
  int fld = static_cast<int>(r.range(0, 1));
  o << kHeader << "fn pick<'a>(p: &'a mut (i32, i32)) -> (ret: &'a mut i32) {\n  ret = &mut (*p)." << fld
    << ";\n  return;\n}\n\n";
  o << "fn main() -> (ret: (i32, i32)) {\n  locals { t: (i32, i32), pt: &mut (i32, i32), x: &mut i32, y: &mut i32 }\n";
  o << "  t = (" << lit(r.range(-20, 20)) << ", " << lit(r.range(-20, 20)) << ");\n";
  o << "  pt = &mut t;\n  x = pick::<'_>(move pt);\n  y = &mut *x;\n";
  o << "  *y = copy *y * " << lit(r.range(-70000, 70000)) << ";\n";
  o << "  *x = copy *x + 1;\n  ret = move t;\n  return;\n}\n";
  return o.str();
}

// Sum of a list through nested shared borrows and a boxed tail.
std::string sum_list(Rng& r) {
  std::ostringstream o;
  int n = static_cast<int>(r.range(0, 7));
  o << kHeader << list_decls();
  o << "fn main() -> (ret: i32) {\n  locals { l: List<i32>, s1: &List<i32>, s2: &List<i32>, a: i32, b: i32 }\n";
  o << "  l = " << list_lit(r, n) << ";\n  s1 = &l;\n  s2 = &*s1;\n";
  o << "  a = sum::<'_>(move s1);\n  b = sum::<'_>(move s2);\n  ret = move a " << (r.coin() ? "+" : "*")
    << " move b;\n  return;\n}\n";
  return o.str();
}

using Family = std::string (*)(Rng&);
struct Named {
  const char* name;
  Family f;
};
const std::vector<Named>& table() {
  static const std::vector<Named> t = {
      {"arith", arith},   {"mut_chain", mut_chain}, {"choose", choose}, {"shared", shared},
      {"reserved", reserved}, {"boxed", boxed},     {"list_nth", list_nth}, {"recursion", recursion},
      {"fields", fields}, {"swap", swap},           {"option", option}, {"suffix", suffix},
      {"project", project}, {"sum_list", sum_list},
  };
  return t;
}

} // namespace

size_t families() { return table().size(); }

GenProgram generate(size_t family, uint64_t seed) {
  const auto& n = table()[family % families()];
  Rng r(seed * 0x9E3779B97F4A7C15ull + family);
  GenProgram g;
  g.family = n.name;
  g.seed = seed;
  g.text = n.f(r);
  return g;
}

std::vector<GenProgram> generate_suite(size_t n, uint64_t base_seed) {
  std::vector<GenProgram> out;
  for (size_t i = 0; i < n; ++i) out.push_back(generate(i % families(), base_seed + i / families()));
  return out;
}

} // namespace llbc::testing
