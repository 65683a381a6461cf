#![allow(dead_code)]

use boxstep::eval::{reduction_trace, EvaluationContext, ReductionTrace};
use boxstep::syntax::{parse_all, parse_expr};

pub const FACTORIAL: &str = "(define (! n)
  (if (<= n 1)
      1
      (* n (! (- n 1)))))
";

pub const PRELUDE: &str = "(define (! n)
  (if (<= n 1)
      1
      (* n (! (- n 1)))))
(define (fib n)
  (if (< n 2)
      n
      (+ (fib (- n 1)) (fib (- n 2)))))
(define (twice f x) (f (f x)))
(define (square x) (* x x))
(define (first a . rest) a)
(define (count . xs) xs)
(define (k a b) a)
(define answer 42)
(define (spin n) (spin (+ n 1)))
";

pub fn context() -> EvaluationContext {
    let mut ctx = EvaluationContext::with_defaults();
    ctx.load_prelude(&parse_all(PRELUDE).unwrap()).unwrap();
    ctx
}

pub fn trace(src: &str, max_steps: usize) -> ReductionTrace {
    let mut t = reduction_trace(parse_expr(src).unwrap(), &context(), max_steps);
    t.run_to_end();
    t
}

/// Terms that reach a normal form, covering every kind of step.
pub const TERMS: &[&str] = &[
    "42",
    "(+ 1 2)",
    "(+ 1 (* 2 3))",
    "(- (* 4 5) (/ 12 4) 1)",
    "(/ 1 3)",
    "(* 1/2 (+ 1/3 1/6))",
    "(if #f 1 2)",
    "(if (< 1 2) (+ 1 1) (+ 2 2))",
    "(if (= 1 2) 'no (if (> 3 2) 'yes 'maybe))",
    "(if (if #f #f #t) (if #t 10 20) 30)",
    "((lambda (x) (* x x)) 7)",
    "((lambda (x y) (- x y)) 10 (+ 1 2))",
    "((lambda (x) ((lambda (x) (+ x 1)) (* x 2))) 5)",
    "((lambda (x) ((lambda (y) (+ x y)) 3)) 4)",
    "((lambda (f) (f 3)) (lambda (n) (* n n)))",
    "(quote (a b c))",
    "'(1 . 2)",
    "((lambda (x) x) '(a b))",
    "((lambda (x) (quote x)) 5)",
    "((lambda args args) 1 2 3)",
    "((lambda (a . rest) rest) 1 2 3)",
    "(first 1 2 3)",
    "(count)",
    "(count 1 (+ 1 1))",
    "(k 1 (+ 2 3))",
    "(! 1)",
    "(! 5)",
    "(fib 5)",
    "(twice square 3)",
    "(twice (lambda (x) (+ x 1)) 0)",
    "answer",
    "(+ answer 1)",
    "(eq? 'a 'a)",
    "(square (square 2))",
    "(undefined-op 1 (+ 1 1))",
    "(\"text\" 1)",
];

/// Sources for the reader, each with something a naive printer would lose.
pub const SOURCES: &[&str] = &[
    "x",
    "42",
    "-7/3",
    "#t",
    "\"a string with \\\"escapes\\\"\"",
    "()",
    "(  )",
    "(a b c)",
    "(a  b   c)",
    "( a b )",
    "(a . b)",
    "(a b . c)",
    "(a\n . b)",
    "(a .b)",
    "'x",
    "' x",
    "'(1 2)",
    "''x",
    "(quote x)",
    "(a ; trailing\n b)",
    "; leading\n(a b)",
    "(a b) ; after\n",
    "(a #| block |# b)",
    "(a #| nested #| twice |# |# b)",
    "#| before |# x",
    "(a\n #| multi\n    line |#\n b)",
    "(define (! n)\n  (if (<= n 1)\n      1\n      (* n (! (- n 1)))))",
    "(let ((x 1)\n      (y 2))\n  (+ x y))",
    "(a\n\n\n b)",
    "(a\t b)",
    "(((deeply)) (nested (lists)))",
    "(lambda (a . rest) rest)",
    "(\"with\nnewline\" and-more)",
    "(symbols-with->arrows and? <=)",
    "(a #|x|#. b)",
    "(a ; one\n ; two\n b ; three\n)",
    "\n\n(a)\n\n",
    "(1.5 -0.25 +3 #f #false)",
];
