//! SE(3) pose algebra: rigid-body transforms, Tait-Bryan motion vectors,
//! trajectories, and rigid trajectory alignment.
//!
//! A [`Pose`] is a 4x4 homogeneous transform with an orthonormal rotation
//! block (det +1, orthonormality error below 1e-9 after construction) and a
//! fixed (0,0,0,1) bottom row. A [`MotionVector`] is the 6-DOF relative
//! motion between consecutive frames: three intrinsic y, x', z'' Tait-Bryan
//! angles followed by a translation, which is also the network's per-timestep
//! output layout.
//!
//! All angles are radians; degrees appear only at report boundaries.

use nalgebra::{Matrix3, Matrix4, Vector3};

use crate::error::{Error, Result};

/// Orthonormality drift above this triggers re-orthonormalization.
pub const ORTHONORMALITY_TOL: f64 = 1e-9;
/// |cos(pitch)| below this is treated as gimbal lock rather than guessed.
const GIMBAL_LOCK_COS: f64 = 1e-7;

/// Max-abs deviation of `r^T r` from identity, plus determinant error.
fn orthonormality_error(r: &Matrix3<f64>) -> f64 {
    let gram = r.transpose() * r;
    let mut err: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let target = if i == j { 1.0 } else { 0.0 };
            err = err.max((gram[(i, j)] - target).abs());
        }
    }
    err.max((r.determinant() - 1.0).abs())
}

/// Nearest rotation matrix in the Frobenius sense (polar factor via SVD),
/// with the sign fixed so the determinant is +1.
fn orthonormalize(r: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = r.svd(true, true);
    let u = svd.u.expect("svd of 3x3 always yields u");
    let v_t = svd.v_t.expect("svd of 3x3 always yields v_t");
    let mut candidate = u * v_t;
    if candidate.determinant() < 0.0 {
        let mut flipped = u;
        flipped.column_mut(2).neg_mut();
        candidate = flipped * v_t;
    }
    candidate
}

/// Rotation angle of an orthonormal matrix: arccos((trace - 1)/2), in [0, pi].
pub fn rotation_angle_of(r: &Matrix3<f64>) -> f64 {
    let cos = ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    cos.acos()
}

/// A rigid-body transform: rotation + translation as a 4x4 homogeneous matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    matrix: Matrix4<f64>,
}

impl Pose {
    pub fn identity() -> Self {
        Pose { matrix: Matrix4::identity() }
    }

    /// Builds a pose from a rotation block and a translation.
    ///
    /// The rotation may carry numerical drift up to `max_rotation_err`; drift
    /// above [`ORTHONORMALITY_TOL`] is corrected by projection onto the
    /// nearest rotation. Anything worse than `max_rotation_err` is rejected.
    pub fn from_parts_with_tolerance(
        rotation: Matrix3<f64>,
        translation: Vector3<f64>,
        max_rotation_err: f64,
    ) -> Result<Self> {
        if rotation.iter().any(|v| !v.is_finite()) || translation.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("pose components must be finite".into()));
        }
        let err = orthonormality_error(&rotation);
        if err > max_rotation_err {
            return Err(Error::InvalidArgument(format!(
                "rotation block is not orthonormal (error {err:.3e} > {max_rotation_err:.3e})"
            )));
        }
        let rotation = if err > ORTHONORMALITY_TOL { orthonormalize(&rotation) } else { rotation };
        let mut matrix = Matrix4::identity();
        matrix.fixed_view_mut::<3, 3>(0, 0).copy_from(&rotation);
        matrix.fixed_view_mut::<3, 1>(0, 3).copy_from(&translation);
        Ok(Pose { matrix })
    }

    pub fn from_parts(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self> {
        Self::from_parts_with_tolerance(rotation, translation, 1e-6)
    }

    /// Builds a pose from a full 4x4 matrix; the bottom row must already be
    /// (0,0,0,1) up to 1e-12 and is snapped exact.
    pub fn from_matrix(matrix: Matrix4<f64>) -> Result<Self> {
        let bottom = matrix.row(3);
        let expected = [0.0, 0.0, 0.0, 1.0];
        for (k, &e) in expected.iter().enumerate() {
            if (bottom[k] - e).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "bottom row must be (0,0,0,1), found {} at column {k}",
                    bottom[k]
                )));
            }
        }
        let r = matrix.fixed_view::<3, 3>(0, 0).into_owned();
        let t = matrix.fixed_view::<3, 1>(0, 3).into_owned();
        Self::from_parts(r, t)
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.matrix
    }

    pub fn rotation(&self) -> Matrix3<f64> {
        self.matrix.fixed_view::<3, 3>(0, 0).into_owned()
    }

    pub fn translation(&self) -> Vector3<f64> {
        self.matrix.fixed_view::<3, 1>(0, 3).into_owned()
    }

    /// Rigid composition `self * rel`, re-orthonormalizing the rotation when
    /// accumulated drift exceeds [`ORTHONORMALITY_TOL`].
    pub fn compose(&self, rel: &Pose) -> Pose {
        let product = self.matrix * rel.matrix;
        let r = product.fixed_view::<3, 3>(0, 0).into_owned();
        let t = product.fixed_view::<3, 1>(0, 3).into_owned();
        let r = if orthonormality_error(&r) > ORTHONORMALITY_TOL { orthonormalize(&r) } else { r };
        let mut matrix = Matrix4::identity();
        matrix.fixed_view_mut::<3, 3>(0, 0).copy_from(&r);
        matrix.fixed_view_mut::<3, 1>(0, 3).copy_from(&t);
        Pose { matrix }
    }

    /// Rigid inverse: `[R|t]^-1 = [R^T | -R^T t]`.
    pub fn inverse(&self) -> Pose {
        let r_t = self.rotation().transpose();
        let t = -(r_t * self.translation());
        let mut matrix = Matrix4::identity();
        matrix.fixed_view_mut::<3, 3>(0, 0).copy_from(&r_t);
        matrix.fixed_view_mut::<3, 1>(0, 3).copy_from(&t);
        Pose { matrix }
    }

    /// Relative transform from `self` to `other`: `self.compose(result) == other`.
    pub fn relative(&self, other: &Pose) -> Pose {
        self.inverse().compose(other)
    }

    /// Rotation angle in [0, pi].
    pub fn rotation_angle(&self) -> f64 {
        rotation_angle_of(&self.rotation())
    }
}

/// One relative camera motion: intrinsic y, x', z'' Tait-Bryan angles
/// (radians) and a translation (meters), both in the frame of the earlier
/// pose. Matches the 6-unit network output: angles first, translation last.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MotionVector {
    pub angles: Vector3<f64>,
    pub translation: Vector3<f64>,
}

impl MotionVector {
    pub fn new(angles: Vector3<f64>, translation: Vector3<f64>) -> Self {
        MotionVector { angles, translation }
    }

    pub fn zero() -> Self {
        MotionVector { angles: Vector3::zeros(), translation: Vector3::zeros() }
    }

    pub fn from_array(v: [f64; 6]) -> Self {
        MotionVector {
            angles: Vector3::new(v[0], v[1], v[2]),
            translation: Vector3::new(v[3], v[4], v[5]),
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [
            self.angles.x,
            self.angles.y,
            self.angles.z,
            self.translation.x,
            self.translation.y,
            self.translation.z,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.angles.iter().all(|v| v.is_finite()) && self.translation.iter().all(|v| v.is_finite())
    }
}

fn rot_y(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

fn rot_x(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

fn rot_z(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Converts a motion vector to a pose: `R = Ry(a1) * Rx(a2) * Rz(a3)`
/// (intrinsic y, x', z'' composition), translation copied through.
pub fn motion_to_pose(m: &MotionVector) -> Result<Pose> {
    if !m.is_finite() {
        return Err(Error::InvalidArgument("motion vector must be finite".into()));
    }
    let r = rot_y(m.angles.x) * rot_x(m.angles.y) * rot_z(m.angles.z);
    Pose::from_parts(r, m.translation)
}

/// Extracts the motion vector of a pose using the principal branch
/// (second angle in (-pi/2, pi/2)).
///
/// For `R = Ry(a1) Rx(a2) Rz(a3)`, `R[1][2] = -sin(a2)`; near |sin| = 1 the
/// first and third axes collapse and the extraction errors out instead of
/// guessing — relative motions between consecutive frames are small, so a
/// locked pitch indicates corrupted data.
pub fn pose_to_motion(p: &Pose) -> Result<MotionVector> {
    let r = p.rotation();
    let sin_pitch = (-r[(1, 2)]).clamp(-1.0, 1.0);
    let cos_pitch = (1.0 - sin_pitch * sin_pitch).max(0.0).sqrt();
    if cos_pitch < GIMBAL_LOCK_COS {
        return Err(Error::DegenerateOrientation(format!(
            "x' (pitch) angle at +/-pi/2 (sin = {sin_pitch:+.9}); y and z'' axes are degenerate"
        )));
    }
    let a1 = r[(0, 2)].atan2(r[(2, 2)]);
    let a2 = sin_pitch.asin();
    let a3 = r[(1, 0)].atan2(r[(1, 1)]);
    Ok(MotionVector::new(Vector3::new(a1, a2, a3), p.translation()))
}

/// An ordered pose sequence; index i is time step i, spaced `frame_period`
/// seconds apart.
#[derive(Clone, Debug)]
pub struct Trajectory {
    poses: Vec<Pose>,
    frame_period: f64,
}

impl Trajectory {
    pub fn new(poses: Vec<Pose>, frame_period: f64) -> Result<Self> {
        if poses.is_empty() {
            return Err(Error::InvalidArgument("trajectory must contain at least one pose".into()));
        }
        Ok(Trajectory { poses, frame_period })
    }

    pub fn poses(&self) -> &[Pose] {
        &self.poses
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn frame_period(&self) -> f64 {
        self.frame_period
    }

    /// Chains relative motions onto `initial`:
    /// `poses[i] = poses[i-1] * motion_to_pose(motions[i-1])`.
    pub fn accumulate(
        initial: Pose,
        motions: &[MotionVector],
        frame_period: f64,
    ) -> Result<Trajectory> {
        let mut poses = Vec::with_capacity(motions.len() + 1);
        poses.push(initial);
        for m in motions {
            let rel = motion_to_pose(m)?;
            let prev = *poses.last().expect("non-empty by construction");
            poses.push(prev.compose(&rel));
        }
        Trajectory::new(poses, frame_period)
    }

    /// Per-step relative motions; `accumulate` over them reproduces `self`.
    pub fn relative_motions(&self) -> Result<Vec<MotionVector>> {
        self.poses
            .windows(2)
            .map(|w| pose_to_motion(&w[0].relative(&w[1])))
            .collect()
    }

    /// Applies one rigid transform (left multiplication) to every pose.
    pub fn transformed(&self, transform: &Pose) -> Trajectory {
        Trajectory {
            poses: self.poses.iter().map(|p| transform.compose(p)).collect(),
            frame_period: self.frame_period,
        }
    }
}

/// Least-squares rigid alignment (rotation + translation, no scale) of `est`
/// onto `gt` over the translation components; the aligning rotation also
/// left-multiplies every estimated orientation.
///
/// Monocular scale is part of what the model must learn, so no scale factor
/// is estimated.
pub fn align_rigid(est: &Trajectory, gt: &Trajectory) -> Result<Trajectory> {
    if est.len() != gt.len() {
        return Err(Error::InvalidArgument(format!(
            "trajectory lengths differ: {} vs {}",
            est.len(),
            gt.len()
        )));
    }
    if est.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "alignment needs at least 3 poses, got {}",
            est.len()
        )));
    }
    let n = est.len() as f64;
    let mean = |t: &Trajectory| {
        t.poses().iter().map(|p| p.translation()).sum::<Vector3<f64>>() / n
    };
    let est_mean = mean(est);
    let gt_mean = mean(gt);

    // Cross-covariance of centered translations; its polar factor is the
    // optimal rotation (Kabsch), with the usual sign fix for reflections.
    let mut cross = Matrix3::<f64>::zeros();
    for (pe, pg) in est.poses().iter().zip(gt.poses()) {
        cross += (pg.translation() - gt_mean) * (pe.translation() - est_mean).transpose();
    }
    let svd = cross.svd(true, true);
    let u = svd.u.expect("svd of 3x3 always yields u");
    let v_t = svd.v_t.expect("svd of 3x3 always yields v_t");
    let mut rotation = u * v_t;
    if rotation.determinant() < 0.0 {
        let mut u_fixed = u;
        u_fixed.column_mut(2).neg_mut();
        rotation = u_fixed * v_t;
    }
    let translation = gt_mean - rotation * est_mean;
    let transform = Pose::from_parts(rotation, translation)?;
    Ok(est.transformed(&transform))
}
