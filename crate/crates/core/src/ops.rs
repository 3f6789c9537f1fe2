//! Word-level primitive operations the branch-free kernels are written in.
//!
//! Kernels are generic over [`WordOps`]. [`Native`] compiles down to plain
//! wrapping arithmetic; [`Tracing`] records every primitive and every
//! data-dependent branch outcome so tests can check that a kernel's control
//! flow does not depend on its inputs.

use std::cell::RefCell;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Mul,
    Add,
    Sub,
    Shr,
    And,
    CondSub,
    Branch(bool),
}

pub trait WordOps {
    fn mul(&self, a: u64, b: u64) -> u64;
    fn add(&self, a: u64, b: u64) -> u64;
    fn sub(&self, a: u64, b: u64) -> u64;
    fn shr(&self, a: u64, s: u32) -> u64;
    fn and(&self, a: u64, m: u64) -> u64;
    /// `a - b` when `a >= b`, else `a`, computed with a mask instead of a
    /// jump. Both operands must be below `2^63`.
    fn cond_sub(&self, a: u64, b: u64) -> u64;
    /// A data-dependent branch point. Returns `cond` unchanged.
    fn branch(&self, cond: bool) -> bool;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Native;

impl WordOps for Native {
    #[inline(always)]
    fn mul(&self, a: u64, b: u64) -> u64 {
        a.wrapping_mul(b)
    }
    #[inline(always)]
    fn add(&self, a: u64, b: u64) -> u64 {
        a.wrapping_add(b)
    }
    #[inline(always)]
    fn sub(&self, a: u64, b: u64) -> u64 {
        a.wrapping_sub(b)
    }
    #[inline(always)]
    fn shr(&self, a: u64, s: u32) -> u64 {
        a >> s
    }
    #[inline(always)]
    fn and(&self, a: u64, m: u64) -> u64 {
        a & m
    }
    #[inline(always)]
    fn cond_sub(&self, a: u64, b: u64) -> u64 {
        let d = a.wrapping_sub(b);
        d.wrapping_add(b & 0u64.wrapping_sub(d >> 63))
    }
    #[inline(always)]
    fn branch(&self, cond: bool) -> bool {
        cond
    }
}

/// Records the sequence of operations executed.
#[derive(Debug, Default)]
pub struct Tracing {
    trace: RefCell<Vec<Op>>,
}

impl Tracing {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn take(&self) -> Vec<Op> {
        std::mem::take(&mut *self.trace.borrow_mut())
    }

    fn push(&self, op: Op) {
        self.trace.borrow_mut().push(op);
    }
}

impl WordOps for Tracing {
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.push(Op::Mul);
        Native.mul(a, b)
    }
    fn add(&self, a: u64, b: u64) -> u64 {
        self.push(Op::Add);
        Native.add(a, b)
    }
    fn sub(&self, a: u64, b: u64) -> u64 {
        self.push(Op::Sub);
        Native.sub(a, b)
    }
    fn shr(&self, a: u64, s: u32) -> u64 {
        self.push(Op::Shr);
        Native.shr(a, s)
    }
    fn and(&self, a: u64, m: u64) -> u64 {
        self.push(Op::And);
        Native.and(a, m)
    }
    fn cond_sub(&self, a: u64, b: u64) -> u64 {
        self.push(Op::CondSub);
        Native.cond_sub(a, b)
    }
    fn branch(&self, cond: bool) -> bool {
        self.push(Op::Branch(cond));
        cond
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cond_sub_matches_branching_form() {
        for a in 0..300u64 {
            for b in [1u64, 13, 26, 255] {
                let want = if a >= b { a - b } else { a };
                assert_eq!(Native.cond_sub(a, b), want);
            }
        }
        let big = (1u64 << 62) + 7;
        assert_eq!(Native.cond_sub(big, big), 0);
        assert_eq!(Native.cond_sub(big - 1, big), big - 1);
    }

    #[test]
    fn tracing_records_branch_outcomes() {
        let t = Tracing::new();
        t.add(1, 2);
        t.branch(true);
        t.branch(false);
        assert_eq!(t.take(), vec![Op::Add, Op::Branch(true), Op::Branch(false)]);
        assert!(t.take().is_empty());
    }
}
