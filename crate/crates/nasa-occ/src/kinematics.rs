//! Rigid transforms, skeleton rig, forward kinematics, pose encoding, and the
//! two-vector rotation parameterization.
//!
//! Conventions used by every other module:
//! - A bone frame maps bone-local coordinates to world coordinates,
//!   `x_world = R·x_local + t`.
//! - Rest frames are translation-only: rotation `I`, translation the
//!   cumulative sum of rest offsets along the parent chain. This makes the
//!   tracker's skeletal prior vanish exactly at the rest configuration.
//! - Per-bone local transform is `Translate(rest_offset) ∘ Rotate(joint)`,
//!   so a bone's joint rotates everything downstream of the bone origin.

use thiserror::Error;

use crate::vecmath as vm;

/// Norm floor below which two-vector rotation inputs count as degenerate.
pub const EPS_NORM: f64 = 1e-8;

/// Sentinel parent index of the root bone.
pub const ROOT_PARENT: usize = usize::MAX;

#[derive(Debug, Error, PartialEq)]
pub enum KinematicsError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("degenerate rotation input (near-zero or near-parallel vectors)")]
    DegenerateRotation,
    #[error("invalid rig: {0}")]
    InvalidRig(String),
}

/// Rotational degrees of freedom per joint in dimension `d`.
pub const fn joint_dof(d: usize) -> usize {
    d * (d - 1) / 2
}

/// A rigid frame: the top-left block of the homogeneous (d+1)×(d+1) matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform<const D: usize> {
    pub rotation: [[f64; D]; D],
    pub translation: [f64; D],
}

impl<const D: usize> RigidTransform<D> {
    pub fn identity() -> Self {
        Self {
            rotation: vm::mat_identity(),
            translation: [0.0; D],
        }
    }

    pub fn from_translation(t: [f64; D]) -> Self {
        Self {
            rotation: vm::mat_identity(),
            translation: t,
        }
    }

    pub fn from_rotation(r: [[f64; D]; D]) -> Self {
        Self {
            rotation: r,
            translation: [0.0; D],
        }
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            rotation: vm::mat_mul(&self.rotation, &other.rotation),
            translation: vm::add(&vm::mat_vec(&self.rotation, &other.translation), &self.translation),
        }
    }

    /// Analytic inverse `(Rᵀ, −Rᵀt)`; no numeric matrix inversion anywhere.
    pub fn inverse(&self) -> Self {
        let rt = vm::mat_transpose(&self.rotation);
        let t = vm::scale(&vm::mat_vec(&rt, &self.translation), -1.0);
        Self {
            rotation: rt,
            translation: t,
        }
    }

    pub fn apply_point(&self, x: &[f64; D]) -> [f64; D] {
        vm::add(&vm::mat_vec(&self.rotation, x), &self.translation)
    }

    pub fn apply_vector(&self, v: &[f64; D]) -> [f64; D] {
        vm::mat_vec(&self.rotation, v)
    }

    /// Max deviation from a proper rotation: orthogonality residual and
    /// `|det − 1|` combined.
    pub fn rotation_error(&self) -> f64 {
        let ortho = vm::orthogonality_error(&self.rotation);
        let det = (vm::mat_det(&self.rotation) - 1.0).abs();
        ortho.max(det)
    }

    pub fn is_rigid(&self, tol: f64) -> bool {
        self.rotation_error() <= tol
    }

    /// Re-orthogonalizes the rotation block in place (Gram-Schmidt on the
    /// first two columns). Used after incremental frame updates to stop
    /// round-off drift from accumulating.
    pub fn reorthogonalize(&mut self) {
        let cols: Vec<[f64; D]> = (0..D)
            .map(|j| {
                let mut c = [0.0; D];
                for i in 0..D {
                    c[i] = self.rotation[i][j];
                }
                c
            })
            .collect();
        self.rotation =
            rotation_from_two_vectors(&cols[0], &cols[1]).expect("near-rotation input");
    }
}

/// 2D rotation by `angle`.
pub fn rotation2(angle: f64) -> [[f64; 2]; 2] {
    let (s, c) = angle.sin_cos();
    [[c, -s], [s, c]]
}

/// 3D rotation from an axis-angle vector (Rodrigues, series-stable near 0).
pub fn rotation3(axis_angle: &[f64; 3]) -> [[f64; 3]; 3] {
    let theta2 = vm::dot(axis_angle, axis_angle);
    let theta = theta2.sqrt();
    let (a, b) = if theta < 1e-6 {
        // sin(t)/t and (1-cos(t))/t² series
        (1.0 - theta2 / 6.0, 0.5 - theta2 / 24.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    let [wx, wy, wz] = *axis_angle;
    let k = [[0.0, -wz, wy], [wz, 0.0, -wx], [-wy, wx, 0.0]];
    let k2 = vm::mat_mul(&k, &k);
    let mut r = vm::mat_identity::<3>();
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] += a * k[i][j] + b * k2[i][j];
        }
    }
    r
}

/// Rotation for one joint from its parameter slice (angle in 2D, axis-angle
/// in 3D).
pub fn joint_rotation<const D: usize>(params: &[f64]) -> [[f64; D]; D] {
    assert_eq!(params.len(), joint_dof(D));
    let mut out = [[0.0; D]; D];
    match D {
        2 => {
            let r = rotation2(params[0]);
            for i in 0..2 {
                out[i][..2].copy_from_slice(&r[i]);
            }
        }
        3 => {
            let aa = [params[0], params[1], params[2]];
            let r = rotation3(&aa);
            for i in 0..3 {
                out[i][..3].copy_from_slice(&r[i]);
            }
        }
        _ => panic!("only D = 2 and D = 3 are supported"),
    }
    out
}

/// Rotation angle magnitude of a relative rotation matrix, in radians.
pub fn rotation_angle<const D: usize>(r: &[[f64; D]; D]) -> f64 {
    match D {
        2 => r[1][0].atan2(r[0][0]).abs(),
        3 => {
            let trace = r[0][0] + r[1][1] + r[2][2];
            (((trace - 1.0) / 2.0).clamp(-1.0, 1.0)).acos()
        }
        _ => panic!("only D = 2 and D = 3 are supported"),
    }
}

/// Skeleton topology with per-bone rest offsets. Bone 0 is the root; parents
/// precede children.
#[derive(Debug, Clone, PartialEq)]
pub struct Rig<const D: usize> {
    parent: Vec<usize>,
    rest_offset: Vec<[f64; D]>,
}

impl<const D: usize> Rig<D> {
    pub fn new(parent: Vec<usize>, rest_offset: Vec<[f64; D]>) -> Result<Self, KinematicsError> {
        if !(D == 2 || D == 3) {
            return Err(KinematicsError::InvalidRig(format!(
                "unsupported dimension {D}"
            )));
        }
        if parent.is_empty() || parent.len() != rest_offset.len() {
            return Err(KinematicsError::InvalidRig(
                "parent and rest_offset lengths must match and be non-empty".into(),
            ));
        }
        if parent[0] != ROOT_PARENT {
            return Err(KinematicsError::InvalidRig(
                "bone 0 must be the root (sentinel parent)".into(),
            ));
        }
        for (b, &p) in parent.iter().enumerate().skip(1) {
            if p >= b {
                return Err(KinematicsError::InvalidRig(format!(
                    "parent[{b}] = {p} must be < {b}"
                )));
            }
        }
        if rest_offset.iter().flatten().any(|v| !v.is_finite()) {
            return Err(KinematicsError::InvalidRig("non-finite rest offset".into()));
        }
        Ok(Self {
            parent,
            rest_offset,
        })
    }

    /// Serial chain of `bones` bones: root offset zero, every further bone
    /// offset by `segment` along its parent's first axis.
    pub fn chain(bones: usize, segment: f64) -> Self {
        assert!(bones >= 1);
        let mut parent = vec![ROOT_PARENT];
        let mut rest_offset = vec![[0.0; D]];
        for b in 1..bones {
            parent.push(b - 1);
            let mut off = [0.0; D];
            off[0] = segment;
            rest_offset.push(off);
        }
        Self {
            parent,
            rest_offset,
        }
    }

    pub fn bone_count(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, b: usize) -> Option<usize> {
        let p = self.parent[b];
        (p != ROOT_PARENT).then_some(p)
    }

    pub fn parents(&self) -> &[usize] {
        &self.parent
    }

    pub fn rest_offset(&self, b: usize) -> &[f64; D] {
        &self.rest_offset[b]
    }

    pub fn rest_offsets(&self) -> &[[f64; D]] {
        &self.rest_offset
    }

    /// Directed edges (parent, child), in child order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parent
            .iter()
            .enumerate()
            .skip(1)
            .map(|(b, &p)| (p, b))
    }

    /// Translation-only rest frames: cumulative offsets along each chain.
    pub fn rest_frames(&self) -> Vec<RigidTransform<D>> {
        let mut frames: Vec<RigidTransform<D>> = Vec::with_capacity(self.bone_count());
        for b in 0..self.bone_count() {
            let t = match self.parent(b) {
                None => self.rest_offset[b],
                Some(p) => vm::add(&frames[p].translation, &self.rest_offset[b]),
            };
            frames.push(RigidTransform::from_translation(t));
        }
        frames
    }

    pub fn rest_pose(&self) -> Pose<D> {
        Pose::rest(self.bone_count())
    }
}

/// Joint parameters (flat, `B × joint_dof(D)`) plus a root transform.
#[derive(Debug, Clone, PartialEq)]
pub struct Pose<const D: usize> {
    pub joint_params: Vec<f64>,
    pub root: RigidTransform<D>,
}

impl<const D: usize> Pose<D> {
    pub fn new(joint_params: Vec<f64>, root: RigidTransform<D>) -> Self {
        Self { joint_params, root }
    }

    pub fn rest(bones: usize) -> Self {
        Self {
            joint_params: vec![0.0; bones * joint_dof(D)],
            root: RigidTransform::identity(),
        }
    }

    pub fn bone_count(&self) -> usize {
        self.joint_params.len() / joint_dof(D)
    }

    pub fn joint(&self, b: usize) -> &[f64] {
        let k = joint_dof(D);
        &self.joint_params[b * k..(b + 1) * k]
    }

    pub fn joint_mut(&mut self, b: usize) -> &mut [f64] {
        let k = joint_dof(D);
        &mut self.joint_params[b * k..(b + 1) * k]
    }

    /// Magnitude of bone `b`'s joint rotation (|angle| in 2D, axis-angle norm
    /// in 3D).
    pub fn joint_magnitude(&self, b: usize) -> f64 {
        let j = self.joint(b);
        j.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Left-composes a global transform onto the root.
    pub fn with_global(&self, g: &RigidTransform<D>) -> Self {
        Self {
            joint_params: self.joint_params.clone(),
            root: g.compose(&self.root),
        }
    }
}

/// Posed bone frames with analytically cached inverses.
#[derive(Debug, Clone)]
pub struct PosedBones<const D: usize> {
    bones: Vec<RigidTransform<D>>,
    inverses: Vec<RigidTransform<D>>,
}

impl<const D: usize> PosedBones<D> {
    pub fn from_bones(bones: Vec<RigidTransform<D>>) -> Self {
        let inverses = bones.iter().map(RigidTransform::inverse).collect();
        Self { bones, inverses }
    }

    pub fn bone_count(&self) -> usize {
        self.bones.len()
    }

    pub fn bones(&self) -> &[RigidTransform<D>] {
        &self.bones
    }

    pub fn inverses(&self) -> &[RigidTransform<D>] {
        &self.inverses
    }

    pub fn bone(&self, b: usize) -> &RigidTransform<D> {
        &self.bones[b]
    }

    pub fn inverse(&self, b: usize) -> &RigidTransform<D> {
        &self.inverses[b]
    }

    /// Compact pose descriptor: per bone, the root origin expressed in that
    /// bone's frame. Invariant under global rigid motion.
    pub fn encoding(&self) -> Vec<f64> {
        encoding_from_inverses(&self.inverses)
    }
}

/// Pose encoding from inverse frames directly (the tracker maintains
/// inverses, never the forward frames).
pub fn encoding_from_inverses<const D: usize>(inverses: &[RigidTransform<D>]) -> Vec<f64> {
    // World root origin recovered from the root's inverse frame:
    // B₀ = C₀⁻¹ has translation −R_C₀ᵀ·t_C₀.
    let c0 = &inverses[0];
    let t0 = vm::scale(&vm::mat_tvec(&c0.rotation, &c0.translation), -1.0);
    let mut enc = Vec::with_capacity(inverses.len() * D);
    for c in inverses {
        enc.extend_from_slice(&c.apply_point(&t0));
    }
    enc
}

/// Forward kinematics: `B_b = root ∘ Π_{a∈chain(b)} Translate(offset_a) ∘ Rotate(joint_a)`.
pub fn forward_kinematics<const D: usize>(
    rig: &Rig<D>,
    pose: &Pose<D>,
) -> Result<PosedBones<D>, KinematicsError> {
    let b_count = rig.bone_count();
    if pose.joint_params.len() != b_count * joint_dof(D) {
        return Err(KinematicsError::DimensionMismatch {
            expected: b_count * joint_dof(D),
            got: pose.joint_params.len(),
        });
    }
    if pose.joint_params.iter().any(|x| !x.is_finite()) {
        return Err(KinematicsError::InvalidRig("non-finite joint parameter".into()));
    }
    let mut bones: Vec<RigidTransform<D>> = Vec::with_capacity(b_count);
    for b in 0..b_count {
        let local = RigidTransform {
            rotation: joint_rotation::<D>(pose.joint(b)),
            translation: *rig.rest_offset(b),
        };
        let world = match rig.parent(b) {
            None => pose.root.compose(&local),
            Some(p) => bones[p].compose(&local),
        };
        bones.push(world);
    }
    Ok(PosedBones::from_bones(bones))
}

/// Gram-Schmidt rotation from two vectors. In 2D only `u` is used (its
/// angle); in 3D the columns are `u/‖u‖`, the orthonormalized `v`, and their
/// cross product.
pub fn rotation_from_two_vectors<const D: usize>(
    u: &[f64; D],
    v: &[f64; D],
) -> Result<[[f64; D]; D], KinematicsError> {
    let nu = vm::norm(u);
    if nu <= EPS_NORM {
        return Err(KinematicsError::DegenerateRotation);
    }
    let r1 = vm::scale(u, 1.0 / nu);
    let mut r = [[0.0; D]; D];
    match D {
        2 => {
            // Columns r1 and perp(r1).
            r[0][0] = r1[0];
            r[1][0] = r1[1];
            r[0][1] = -r1[1];
            r[1][1] = r1[0];
        }
        3 => {
            let nv = vm::norm(v);
            if nv <= EPS_NORM {
                return Err(KinematicsError::DegenerateRotation);
            }
            let s = vm::dot(v, &r1);
            let w = vm::sub(v, &vm::scale(&r1, s));
            let nw = vm::norm(&w);
            if nw <= EPS_NORM * nv {
                return Err(KinematicsError::DegenerateRotation);
            }
            let r2 = vm::scale(&w, 1.0 / nw);
            let r3 = vm::cross(&r1, &r2);
            for i in 0..3 {
                r[i][0] = r1[i];
                r[i][1] = r2[i];
                r[i][2] = r3[i];
            }
        }
        _ => panic!("only D = 2 and D = 3 are supported"),
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{make_rng, normal_vector};
    use rand::Rng;

    fn transform_close<const D: usize>(a: &RigidTransform<D>, b: &RigidTransform<D>, tol: f64) -> bool {
        let mut worst = 0.0f64;
        for i in 0..D {
            worst = worst.max((a.translation[i] - b.translation[i]).abs());
            for j in 0..D {
                worst = worst.max((a.rotation[i][j] - b.rotation[i][j]).abs());
            }
        }
        worst <= tol
    }

    fn random_pose<const D: usize>(rig: &Rig<D>, rng: &mut impl Rng) -> Pose<D> {
        let mut pose = rig.rest_pose();
        for x in pose.joint_params.iter_mut() {
            *x = rng.gen_range(-1.5..1.5);
        }
        let g = random_rigid::<D>(rng);
        pose.root = g;
        pose
    }

    fn random_rigid<const D: usize>(rng: &mut impl Rng) -> RigidTransform<D> {
        let u = normal_vector::<D>(rng);
        let v = normal_vector::<D>(rng);
        let rotation = rotation_from_two_vectors(&u, &v).unwrap();
        let translation = normal_vector::<D>(rng);
        RigidTransform {
            rotation,
            translation,
        }
    }

    #[test]
    fn rest_pose_reproduces_rest_frames() {
        let rig = Rig::<2>::chain(4, 0.5);
        let posed = forward_kinematics(&rig, &rig.rest_pose()).unwrap();
        for (b, rest) in rig.rest_frames().iter().enumerate() {
            assert!(transform_close(posed.bone(b), rest, 1e-12));
        }
    }

    #[test]
    fn two_bone_chain_bends_as_hand_computed() {
        // Offsets (1,0) each; first bone's joint at π/2.
        let rig = Rig::<2>::new(
            vec![ROOT_PARENT, 0],
            vec![[1.0, 0.0], [1.0, 0.0]],
        )
        .unwrap();
        let mut pose = rig.rest_pose();
        pose.joint_mut(0)[0] = std::f64::consts::FRAC_PI_2;
        let posed = forward_kinematics(&rig, &pose).unwrap();
        // Hand composition: t_first = (1,0); t_second = (1,0) + R(π/2)[1,0] = (1,1).
        assert!(vm::distance(&posed.bone(0).translation, &[1.0, 0.0]) < 1e-12);
        assert!(vm::distance(&posed.bone(1).translation, &[1.0, 1.0]) < 1e-12);
    }

    #[test]
    fn fk_is_equivariant_under_global_transforms() {
        let rig = Rig::<3>::chain(5, 0.4);
        let mut rng = make_rng(7);
        for _ in 0..20 {
            let pose = random_pose(&rig, &mut rng);
            let g = random_rigid::<3>(&mut rng);
            let lhs = forward_kinematics(&rig, &pose.with_global(&g)).unwrap();
            let rhs = forward_kinematics(&rig, &pose).unwrap();
            for b in 0..rig.bone_count() {
                let expected = g.compose(rhs.bone(b));
                assert!(transform_close(lhs.bone(b), &expected, 1e-6));
            }
        }
    }

    #[test]
    fn cached_inverses_are_exact_over_random_poses() {
        let rig2 = Rig::<2>::chain(5, 0.5);
        let rig3 = Rig::<3>::chain(5, 0.5);
        let mut rng = make_rng(11);
        for _ in 0..500 {
            let posed = forward_kinematics(&rig2, &random_pose(&rig2, &mut rng)).unwrap();
            for b in 0..rig2.bone_count() {
                let prod = posed.bone(b).compose(posed.inverse(b));
                assert!(transform_close(&prod, &RigidTransform::identity(), 1e-6));
            }
        }
        for _ in 0..500 {
            let posed = forward_kinematics(&rig3, &random_pose(&rig3, &mut rng)).unwrap();
            for b in 0..rig3.bone_count() {
                let prod = posed.bone(b).compose(posed.inverse(b));
                assert!(transform_close(&prod, &RigidTransform::identity(), 1e-6));
            }
        }
    }

    #[test]
    fn encoding_at_rest_is_offset_difference() {
        let rig = Rig::<2>::chain(4, 0.5);
        let posed = forward_kinematics(&rig, &rig.rest_pose()).unwrap();
        let enc = posed.encoding();
        let rest = rig.rest_frames();
        for b in 0..4 {
            let expected = vm::sub(&rest[0].translation, &rest[b].translation);
            assert!((enc[2 * b] - expected[0]).abs() < 1e-12);
            assert!((enc[2 * b + 1] - expected[1]).abs() < 1e-12);
        }
        // Block 0 is identically zero.
        assert_eq!(enc[0], 0.0);
        assert_eq!(enc[1], 0.0);
    }

    #[test]
    fn encoding_is_invariant_under_global_transforms() {
        let rig = Rig::<3>::chain(5, 0.4);
        let mut rng = make_rng(23);
        for _ in 0..50 {
            let pose = random_pose(&rig, &mut rng);
            let g = random_rigid::<3>(&mut rng);
            let enc = forward_kinematics(&rig, &pose).unwrap().encoding();
            let enc_g = forward_kinematics(&rig, &pose.with_global(&g))
                .unwrap()
                .encoding();
            for (a, b) in enc.iter().zip(enc_g.iter()) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn fk_rejects_mismatched_pose() {
        let rig = Rig::<2>::chain(3, 0.5);
        let pose = Pose::<2>::rest(2);
        assert!(matches!(
            forward_kinematics(&rig, &pose),
            Err(KinematicsError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn two_vector_rotation_basis_cases() {
        let r = rotation_from_two_vectors(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        assert!(vm::orthogonality_error(&r) < 1e-12);
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((r[i][j] - expected).abs() < 1e-12);
            }
        }
        // Hand Gram-Schmidt: u = 2e₁, v = 5e₃ → columns e₁, e₃, e₁×e₃ = −e₂.
        let r = rotation_from_two_vectors(&[2.0, 0.0, 0.0], &[0.0, 0.0, 5.0]).unwrap();
        let expected = [[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((r[i][j] - expected[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_vector_rotation_is_proper_for_random_inputs() {
        let mut rng = make_rng(3);
        for _ in 0..200 {
            let u = normal_vector::<3>(&mut rng);
            let v = normal_vector::<3>(&mut rng);
            let r = rotation_from_two_vectors(&u, &v).unwrap();
            assert!(vm::orthogonality_error(&r) < 1e-6);
            assert!((vm::mat_det(&r) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn two_vector_rotation_roundtrips_from_columns() {
        let mut rng = make_rng(5);
        for _ in 0..100 {
            let r = random_rigid::<3>(&mut rng).rotation;
            let c0 = [r[0][0], r[1][0], r[2][0]];
            let c1 = [r[0][1], r[1][1], r[2][1]];
            let back = rotation_from_two_vectors(&c0, &c1).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert!((back[i][j] - r[i][j]).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn degenerate_two_vector_inputs_are_rejected() {
        assert_eq!(
            rotation_from_two_vectors(&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0]).unwrap_err(),
            KinematicsError::DegenerateRotation
        );
        assert_eq!(
            rotation_from_two_vectors(&[1.0, 0.0, 0.0], &[2.0, 0.0, 0.0]).unwrap_err(),
            KinematicsError::DegenerateRotation
        );
        assert_eq!(
            rotation_from_two_vectors::<2>(&[0.0, 0.0], &[1.0, 0.0]).unwrap_err(),
            KinematicsError::DegenerateRotation
        );
    }

    #[test]
    fn rotation2_from_u_angle() {
        let r = rotation_from_two_vectors(&[0.0, 3.0], &[0.0, 0.0]).unwrap();
        // u along +y → rotation by π/2.
        let expected = rotation2(std::f64::consts::FRAC_PI_2);
        for i in 0..2 {
            for j in 0..2 {
                assert!((r[i][j] - expected[i][j]).abs() < 1e-12);
            }
        }
    }
}
