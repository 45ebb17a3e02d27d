use crate::spectral::SymmetricMatrix;

/// Real-valued symmetric link scores for every vertex pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionScores(SymmetricMatrix);

impl PredictionScores {
    pub fn new(matrix: SymmetricMatrix) -> Self {
        PredictionScores(matrix)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn score(&self, u: usize, v: usize) -> f64 {
        self.0.get(u, v)
    }

    pub fn matrix(&self) -> &SymmetricMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> SymmetricMatrix {
        self.0
    }
}
