import numpy as np
import pytest

from gesturemetrics.errors import InsufficientDataError, StructuralError
from gesturemetrics.model import (
    JOINT_NAMES,
    N_JOINTS,
    GestureDataset,
    Pose,
    RobotProfile,
    flatten_window,
)
from gesturemetrics.motion import (
    SITES,
    CartesianTrack,
    angular_jerk,
    forward_kinematics,
    jerk,
    motion_report,
    path_length,
    unit_tracks,
)

J = {name: i for i, name in enumerate(JOINT_NAMES)}


@pytest.fixture(scope="module")
def profile():
    return RobotProfile.default()


def pose_with(**angles):
    vals = [0.0] * N_JOINTS
    for name, v in angles.items():
        vals[J[name]] = v
    return Pose(values=tuple(vals))


def random_pose(rng, profile):
    limits = profile.limits_array()
    vals = rng.uniform(limits[:, 0], limits[:, 1])
    return Pose(values=tuple(vals.tolist()))


def homogeneous(r, t):
    m = np.eye(4)
    m[:3, :3] = r
    m[:3, 3] = t
    return m


def fk_oracle(pose, profile):
    """Independent chain evaluation with explicit 4x4 transforms."""
    def rx(a):
        c, s = np.cos(a), np.sin(a)
        return np.array([[1, 0, 0], [0, c, -s], [0, s, c]])

    def ry(a):
        c, s = np.cos(a), np.sin(a)
        return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])

    def rz(a):
        c, s = np.cos(a), np.sin(a)
        return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])

    vals = np.array(pose.values)
    out = {}
    for prefix, sign in (("L", 1.0), ("R", -1.0)):
        base = homogeneous(np.eye(3), [0.0, sign * profile.shoulder_offset, 0.0])
        sh = base @ homogeneous(
            ry(-vals[J[prefix + "ShoulderPitch"]]) @ rz(vals[J[prefix + "ShoulderRoll"]]),
            [0, 0, 0])
        el = sh @ homogeneous(np.eye(3), [profile.upper_arm_length, 0.0, 0.0])
        el_rot = el @ homogeneous(
            rx(vals[J[prefix + "ElbowYaw"]]) @ rz(vals[J[prefix + "ElbowRoll"]]),
            [0, 0, 0])
        hand = el_rot @ homogeneous(np.eye(3), [profile.forearm_length, 0.0, 0.0])
        out[prefix + "elbow"] = el[:3, 3]
        out[prefix + "hand"] = hand[:3, 3]
    return out


class TestForwardKinematics:
    def test_rest_pose_points_forward(self, profile):
        pos = forward_kinematics(pose_with(), profile)
        lu, lf, off = (profile.upper_arm_length, profile.forearm_length,
                       profile.shoulder_offset)
        assert np.allclose(pos["Lelbow"], [lu, off, 0.0], atol=1e-12)
        assert np.allclose(pos["Lhand"], [lu + lf, off, 0.0], atol=1e-12)
        assert np.allclose(pos["Relbow"], [lu, -off, 0.0], atol=1e-12)
        assert np.allclose(pos["Rhand"], [lu + lf, -off, 0.0], atol=1e-12)

    def test_link_lengths_conserved(self, profile):
        rng = np.random.default_rng(0)
        for _ in range(50):
            pose = random_pose(rng, profile)
            pos = forward_kinematics(pose, profile)
            for prefix, sign in (("L", 1.0), ("R", -1.0)):
                sh = np.array([0.0, sign * profile.shoulder_offset, 0.0])
                d_upper = np.linalg.norm(pos[prefix + "elbow"] - sh)
                d_fore = np.linalg.norm(pos[prefix + "hand"] - pos[prefix + "elbow"])
                assert d_upper == pytest.approx(profile.upper_arm_length, abs=1e-12)
                assert d_fore == pytest.approx(profile.forearm_length, abs=1e-12)

    def test_matches_homogeneous_transform_oracle(self, profile):
        rng = np.random.default_rng(1)
        for _ in range(30):
            pose = random_pose(rng, profile)
            got = forward_kinematics(pose, profile)
            want = fk_oracle(pose, profile)
            for site in SITES:
                assert np.allclose(got[site], want[site], atol=1e-12)

    def test_positive_shoulder_roll_moves_left_arm_left(self, profile):
        pos = forward_kinematics(pose_with(LShoulderRoll=0.5), profile)
        rest = forward_kinematics(pose_with(), profile)
        assert pos["Lelbow"][1] > rest["Lelbow"][1]

    def test_elbow_yaw_alone_leaves_straight_arm_hand_fixed(self, profile):
        # rotation about the upper-arm axis cannot move a collinear forearm
        a = forward_kinematics(pose_with(), profile)
        b = forward_kinematics(pose_with(LElbowYaw=1.0, RElbowYaw=-1.0), profile)
        assert np.allclose(a["Lhand"], b["Lhand"], atol=1e-12)
        assert np.allclose(a["Rhand"], b["Rhand"], atol=1e-12)

    def test_arms_mirror_for_mirrored_angles(self, profile):
        pose_l = pose_with(LShoulderPitch=0.7, LShoulderRoll=0.4,
                           LElbowYaw=-0.6, LElbowRoll=-0.9)
        pose_r = pose_with(RShoulderPitch=0.7, RShoulderRoll=-0.4,
                           RElbowYaw=0.6, RElbowRoll=0.9)
        left = forward_kinematics(pose_l, profile)
        right = forward_kinematics(pose_r, profile)
        flip = np.array([1.0, -1.0, 1.0])
        assert np.allclose(left["Lelbow"] * flip, right["Relbow"], atol=1e-12)
        assert np.allclose(left["Lhand"] * flip, right["Rhand"], atol=1e-12)


class TestJerk:
    def test_constant_track_zero(self):
        track = CartesianTrack(points=np.tile([1.0, 2.0, 3.0], (8, 1)), dt=0.25)
        assert jerk(track) == 0.0

    def test_quadratic_track_zero(self):
        t = np.arange(10.0)
        pts = np.column_stack([t ** 2, 2 * t ** 2, np.zeros(10)])
        assert jerk(CartesianTrack(points=pts, dt=1.0)) == pytest.approx(0.0, abs=1e-12)

    def test_cubic_track_exactly_six(self):
        t = np.arange(6.0)
        pts = np.column_stack([t ** 3, np.zeros(6), np.zeros(6)])
        assert jerk(CartesianTrack(points=pts, dt=1.0)) == 6.0

    def test_cubic_track_any_dt_exactly_six(self):
        dt = 0.25
        t = np.arange(8) * dt
        pts = np.column_stack([t ** 3, np.zeros(8), np.zeros(8)])
        assert jerk(CartesianTrack(points=pts, dt=dt)) == pytest.approx(6.0, abs=1e-10)

    def test_translation_invariance(self):
        rng = np.random.default_rng(2)
        pts = rng.normal(size=(12, 3))
        a = jerk(CartesianTrack(points=pts, dt=0.25))
        b = jerk(CartesianTrack(points=pts + [5.0, -2.0, 9.0], dt=0.25))
        assert a == pytest.approx(b, rel=1e-12)

    def test_scaling_is_linear(self):
        rng = np.random.default_rng(3)
        pts = rng.normal(size=(12, 3))
        a = jerk(CartesianTrack(points=pts, dt=0.25))
        b = jerk(CartesianTrack(points=3.0 * pts, dt=0.25))
        assert b == pytest.approx(3.0 * a, rel=1e-12)

    def test_too_short_rejected(self):
        with pytest.raises(InsufficientDataError):
            jerk(CartesianTrack(points=np.zeros((3, 3)), dt=0.25))


class TestPathLength:
    def test_straight_line(self):
        pts = np.column_stack([np.linspace(0, 2, 9), np.zeros(9), np.zeros(9)])
        assert path_length(CartesianTrack(points=pts, dt=0.25)) == pytest.approx(2.0)

    def test_out_and_back_doubles(self):
        pts = np.array([[0.0, 0, 0], [1.0, 0, 0], [0.0, 0, 0]])
        assert path_length(CartesianTrack(points=pts, dt=0.25)) == pytest.approx(2.0)

    def test_polygon_approaches_circumference(self):
        theta = np.linspace(0, 2 * np.pi, 2001)
        pts = np.column_stack([np.cos(theta), np.sin(theta), np.zeros_like(theta)])
        length = path_length(CartesianTrack(points=pts, dt=0.01))
        assert length == pytest.approx(2 * np.pi, rel=1e-5)

    def test_stationary_zero(self):
        pts = np.tile([0.3, -0.1, 0.2], (5, 1))
        assert path_length(CartesianTrack(points=pts, dt=0.25)) == 0.0

    def test_too_short_rejected(self):
        with pytest.raises(InsufficientDataError):
            path_length(CartesianTrack(points=np.zeros((1, 3)), dt=0.25))


class TestAngularJerk:
    def test_cubic_exactly_six(self):
        t = np.arange(7.0)
        assert angular_jerk(t ** 3, 1.0) == 6.0

    def test_linear_zero(self):
        assert angular_jerk(np.arange(6.0) * 0.3, 0.25) == pytest.approx(0.0, abs=1e-12)

    def test_bad_dt(self):
        with pytest.raises(StructuralError):
            angular_jerk(np.arange(6.0), 0.0)

    def test_too_short(self):
        with pytest.raises(InsufficientDataError):
            angular_jerk([0.0, 1.0, 2.0], 0.25)


def build_dataset(rng, profile, n_units, mu, dt=0.25):
    units = []
    for _ in range(n_units):
        poses = [random_pose(rng, profile) for _ in range(mu)]
        units.append(flatten_window(poses, dt=dt))
    return GestureDataset(units=units)


class TestUnitTracks:
    def test_shapes_and_dt(self, profile):
        rng = np.random.default_rng(4)
        ds = build_dataset(rng, profile, 1, 6)
        tracks = unit_tracks(ds.units[0], profile)
        assert set(tracks) == set(SITES)
        for track in tracks.values():
            assert track.points.shape == (6, 3)
            assert track.dt == 0.25

    def test_rows_match_per_pose_fk(self, profile):
        rng = np.random.default_rng(5)
        poses = [random_pose(rng, profile) for _ in range(4)]
        um = flatten_window(poses, dt=0.25)
        tracks = unit_tracks(um, profile)
        for i, pose in enumerate(poses):
            pos = forward_kinematics(pose, profile)
            for site in SITES:
                assert np.allclose(tracks[site].points[i], pos[site], atol=1e-12)


class TestMotionReport:
    def test_matches_per_unit_averaging_oracle(self, profile):
        rng = np.random.default_rng(6)
        ds = build_dataset(rng, profile, 7, 5)
        report = motion_report(ds, profile)
        for site in SITES:
            jerks = []
            paths = []
            for um in ds.units:
                track = unit_tracks(um, profile)[site]
                jerks.append(jerk(track))
                paths.append(path_length(track))
            assert report.jerk_by_site[site] == pytest.approx(np.mean(jerks), abs=1e-12)
            assert report.path_length_by_site[site] == pytest.approx(
                np.mean(paths), abs=1e-12)

    def test_head_jerk_oracle(self, profile):
        rng = np.random.default_rng(7)
        ds = build_dataset(rng, profile, 5, 6)
        report = motion_report(ds, profile)
        for angle, joint in (("yaw", "HeadYaw"), ("pitch", "HeadPitch")):
            vals = [angular_jerk(um.array().reshape(um.mu, N_JOINTS)[:, J[joint]], um.dt)
                    for um in ds.units]
            assert report.head_jerk[angle] == pytest.approx(np.mean(vals), abs=1e-12)

    def test_short_units_flag_jerk_unavailable(self, profile):
        rng = np.random.default_rng(8)
        ds = build_dataset(rng, profile, 4, 2)
        report = motion_report(ds, profile)
        assert not report.jerk_available
        assert all(v is None for v in report.jerk_by_site.values())
        assert all(v is None for v in report.head_jerk.values())
        assert all(v >= 0.0 for v in report.path_length_by_site.values())

    def test_mu_one_paths_are_zero(self, profile):
        rng = np.random.default_rng(9)
        ds = build_dataset(rng, profile, 3, 1)
        report = motion_report(ds, profile)
        assert all(v == 0.0 for v in report.path_length_by_site.values())

    def test_frozen_pose_dataset_all_zero(self, profile):
        pose = pose_with(LShoulderPitch=0.8, RShoulderPitch=0.8)
        units = [flatten_window([pose] * 6, dt=0.25) for _ in range(3)]
        report = motion_report(GestureDataset(units=units), profile)
        assert all(v == pytest.approx(0.0, abs=1e-12)
                   for v in report.jerk_by_site.values())
        assert all(v == pytest.approx(0.0, abs=1e-12)
                   for v in report.path_length_by_site.values())

    def test_to_dict_keys(self, profile):
        rng = np.random.default_rng(10)
        ds = build_dataset(rng, profile, 2, 4)
        d = motion_report(ds, profile).to_dict()
        assert set(d) == {"jerk_by_site", "path_length_by_site", "head_jerk",
                          "jerk_available"}


class TestTrackValidation:
    def test_wrong_width_rejected(self):
        with pytest.raises(StructuralError):
            CartesianTrack(points=np.zeros((5, 2)), dt=0.25)

    def test_nonpositive_dt_rejected(self):
        with pytest.raises(StructuralError):
            CartesianTrack(points=np.zeros((5, 3)), dt=-1.0)
