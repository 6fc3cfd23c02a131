//! Fixed 1D quadrature rules on the reference interval ξ ∈ [−1, 1].
//!
//! The element integrals use two rules side by side: a 4-point
//! Gauss-Legendre rule for bending/inertia terms and a 3-point Gauss-Lobatto
//! rule (points at the nodes and midpoint) for the axial/shear force terms,
//! which under-integrates those terms by exactly the amount needed to keep
//! the discrete constraint ratio at its locking-free value of 2.

/// A quadrature rule: paired evaluation points and weights on [−1, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rule {
    pub points: &'static [f64],
    pub weights: &'static [f64],
}

impl Rule {
    /// Number of evaluation points.
    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Iterate over (ξ, w) pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    /// ∫_{−1}^{1} f(ξ) dξ by this rule.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// 2-point Gauss-Legendre (exact through degree 3).
pub const GAUSS_2: Rule = Rule {
    points: &[-0.577_350_269_189_625_76, 0.577_350_269_189_625_76],
    weights: &[1.0, 1.0],
};

/// 3-point Gauss-Legendre (exact through degree 5).
pub const GAUSS_3: Rule = Rule {
    points: &[-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4],
    weights: &[
        0.555_555_555_555_555_6,
        0.888_888_888_888_888_9,
        0.555_555_555_555_555_6,
    ],
};

/// 4-point Gauss-Legendre (exact through degree 7).
pub const GAUSS_4: Rule = Rule {
    points: &[
        -0.861_136_311_594_052_6,
        -0.339_981_043_584_856_3,
        0.339_981_043_584_856_3,
        0.861_136_311_594_052_6,
    ],
    weights: &[
        0.347_854_845_137_453_85,
        0.652_145_154_862_546_2,
        0.652_145_154_862_546_2,
        0.347_854_845_137_453_85,
    ],
};

/// 5-point Gauss-Legendre (exact through degree 9).
pub const GAUSS_5: Rule = Rule {
    points: &[
        -0.906_179_845_938_664,
        -0.538_469_310_105_683_1,
        0.0,
        0.538_469_310_105_683_1,
        0.906_179_845_938_664,
    ],
    weights: &[
        0.236_926_885_056_189_08,
        0.478_628_670_499_366_47,
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_47,
        0.236_926_885_056_189_08,
    ],
};

/// 10-point Gauss-Legendre (exact through degree 19); arc-length and
/// error-norm integrals.
pub const GAUSS_10: Rule = Rule {
    points: &[
        -0.973_906_528_517_171_7,
        -0.865_063_366_688_984_5,
        -0.679_409_568_299_024_4,
        -0.433_395_394_129_247_2,
        -0.148_874_338_981_631_21,
        0.148_874_338_981_631_21,
        0.433_395_394_129_247_2,
        0.679_409_568_299_024_4,
        0.865_063_366_688_984_5,
        0.973_906_528_517_171_7,
    ],
    weights: &[
        0.066_671_344_308_688_14,
        0.149_451_349_150_580_6,
        0.219_086_362_515_982_04,
        0.269_266_719_309_996_36,
        0.295_524_224_714_752_87,
        0.295_524_224_714_752_87,
        0.269_266_719_309_996_36,
        0.219_086_362_515_982_04,
        0.149_451_349_150_580_6,
        0.066_671_344_308_688_14,
    ],
};

/// 3-point Gauss-Lobatto: points {−1, 0, 1}, weights {1/3, 4/3, 1/3}
/// (exact through degree 3).  Reduced rule for force-type terms.
pub const LOBATTO_3: Rule = Rule {
    points: &[-1.0, 0.0, 1.0],
    weights: &[
        0.333_333_333_333_333_3,
        1.333_333_333_333_333_3,
        0.333_333_333_333_333_3,
    ],
};
