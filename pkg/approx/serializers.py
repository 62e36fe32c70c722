"""Run configuration validation and manifest rendering.

Every subcommand validates its merged configuration (CLI flags over an
optional JSON file) with one of these serializers before computing
anything. Unknown keys are errors.
"""

import math

from rest_framework import serializers

from .models import RunRecord
from .specext import METHODS

SEED_MAX = 2 ** 64 - 1


class CommaListField(serializers.ListField):
    """Accepts a JSON list or a comma separated string such as `4,8,16`."""

    def to_internal_value(self, data):
        if isinstance(data, str):
            data = [item for item in data.split(",") if item.strip()]
        return super().to_internal_value(data)


class StrictSerializer(serializers.Serializer):
    def validate(self, attrs):
        unknown = sorted(set(self.initial_data) - set(self.fields))
        if unknown:
            raise serializers.ValidationError({key: "unknown key" for key in unknown})
        return attrs


def positive_float(**kwargs):
    return serializers.FloatField(min_value=0.0, **kwargs)


def _require_positive(attrs, *names):
    errors = {}
    for name in names:
        value = attrs.get(name)
        if value is not None and not (value > 0 and math.isfinite(value)):
            errors[name] = "must be a finite positive number"
    if errors:
        raise serializers.ValidationError(errors)


class SeededSerializer(StrictSerializer):
    seed = serializers.IntegerField(min_value=0, max_value=SEED_MAX, default=0)
    out = serializers.CharField(required=False)


class DiffConfigSerializer(SeededSerializer):
    NOISE_CHOICES = ("none", "uniform", "alternating")

    input = serializers.CharField(required=False)
    synth = serializers.CharField(required=False)
    samples = serializers.IntegerField(min_value=8, default=4096)
    delta = positive_float()
    m2 = positive_float(required=False)
    j = serializers.FloatField(required=False)
    mj = positive_float(required=False)
    noise = serializers.ChoiceField(choices=NOISE_CHOICES, default="none")

    def validate(self, attrs):
        attrs = super().validate(attrs)
        _require_positive(attrs, "delta", "m2", "mj")
        if bool(attrs.get("input")) == bool(attrs.get("synth")):
            raise serializers.ValidationError("give exactly one of 'input' and 'synth'")
        if attrs.get("m2") is not None:
            if attrs.get("j") not in (None, 2.0) or attrs.get("mj") is not None:
                raise serializers.ValidationError("'m2' cannot be combined with 'j'/'mj'")
            attrs["j"], attrs["mj"] = 2.0, attrs["m2"]
        elif attrs.get("j") is None or attrs.get("mj") is None:
            raise serializers.ValidationError("give 'm2', or both 'j' and 'mj'")
        if not 1 < attrs["j"] <= 2:
            raise serializers.ValidationError({"j": "must lie in (1, 2]; no stable estimator exists for j <= 1"})
        return attrs


class LowerboundConfigSerializer(SeededSerializer):
    m = positive_float()
    delta = positive_float()
    samples = serializers.IntegerField(min_value=1, default=10000)

    def validate(self, attrs):
        attrs = super().validate(attrs)
        _require_positive(attrs, "m", "delta")
        return attrs


class KernelFieldsMixin(serializers.Serializer):
    j = serializers.IntegerField(min_value=1, default=2)
    a = positive_float(default=1.0)
    a1 = positive_float(required=False)
    truncation_radius = positive_float(required=False)
    method = serializers.ChoiceField(choices=METHODS, default="laplacian-expansion")

    def validate_kernel(self, attrs):
        _require_positive(attrs, "a", "a1", "truncation_radius")
        a1 = attrs.get("a1")
        if a1 is not None and not a1 > attrs["a"]:
            raise serializers.ValidationError({"a1": "must exceed a"})
        radius = attrs.get("truncation_radius")
        if radius is not None and not radius > 4 * (a1 or 1.25 * attrs["a"]):
            raise serializers.ValidationError({"truncation_radius": "must exceed 4*a1"})


class SpecextConfigSerializer(KernelFieldsMixin, SeededSerializer):
    ACTIONS = ("sample", "extrapolate", "check-delta")

    action = serializers.ChoiceField(choices=ACTIONS)
    dim = serializers.ChoiceField(choices=(1, 2), default=1)
    window = serializers.CharField(required=False)
    center = CommaListField(child=serializers.FloatField(), required=False)
    radius = positive_float(required=False)
    f = serializers.CharField(default="builtin:c1-bump")
    input = serializers.CharField(required=False)
    grid = serializers.CharField(required=False)
    j_ladder = CommaListField(child=serializers.IntegerField(min_value=1), required=False)
    regions = serializers.CharField(required=False)

    def validate(self, attrs):
        attrs = super().validate(attrs)
        self.validate_kernel(attrs)
        _require_positive(attrs, "radius")
        if attrs["action"] == "extrapolate" and not attrs.get("input"):
            raise serializers.ValidationError({"input": "extrapolate needs spectral samples"})
        if attrs.get("center") is not None and len(attrs["center"]) != attrs["dim"]:
            raise serializers.ValidationError({"center": f"needs {attrs['dim']} coordinates"})
        if attrs["f"] != "builtin:c1-bump":
            raise serializers.ValidationError({"f": "only builtin:c1-bump is available"})
        ladder = attrs.get("j_ladder")
        if ladder is not None and (not ladder or any(b <= a for a, b in zip(ladder, ladder[1:]))):
            raise serializers.ValidationError({"j_ladder": "must be a nonempty increasing list"})
        return attrs


DEFAULT_SECTOR = "30.0:150.0"


class RadonConfigSerializer(KernelFieldsMixin, SeededSerializer):
    ACTIONS = ("simulate", "reconstruct")

    action = serializers.ChoiceField(choices=ACTIONS)
    phantom = serializers.CharField(required=False)
    sector = serializers.CharField(required=False)
    n_alpha = serializers.IntegerField(min_value=1, default=120)
    n_p = serializers.IntegerField(min_value=8, default=401)
    projection = serializers.ChoiceField(choices=("quadrature", "exact"), default="quadrature")
    input = serializers.CharField(required=False)
    T = positive_float(default=3.0)
    radius = positive_float(default=1.0)
    grid = serializers.IntegerField(min_value=2, default=41)

    def validate_sector(self, value):
        parts = value.split(":")
        try:
            lo, hi = (float(v) for v in parts)
        except ValueError:
            raise serializers.ValidationError("expected 'lo:hi' in degrees") from None
        if not 0 < hi - lo < 180:
            raise serializers.ValidationError("sector width must lie strictly between 0 and 180 degrees")
        return f"{lo!r}:{hi!r}"

    def validate(self, attrs):
        attrs = super().validate(attrs)
        self.validate_kernel(attrs)
        _require_positive(attrs, "T", "radius")
        if attrs["action"] == "simulate":
            if not attrs.get("phantom"):
                raise serializers.ValidationError({"phantom": "simulate needs a phantom"})
            attrs.setdefault("sector", DEFAULT_SECTOR)
        if attrs["action"] == "reconstruct" and not attrs.get("input"):
            raise serializers.ValidationError({"input": "reconstruct needs a sinogram"})
        return attrs


class PropcConfigSerializer(SeededSerializer):
    ACTIONS = ("products", "blowup")

    action = serializers.ChoiceField(choices=ACTIONS)
    f = serializers.CharField(default="builtin:exp-cos")
    N = CommaListField(child=serializers.IntegerField(min_value=0), default=[2, 4, 6, 8])
    domain = serializers.ChoiceField(choices=("disc", "annulus"), default="disc")
    t = CommaListField(child=serializers.FloatField(min_value=0.0), default=[0.0, 0.5, 1.0])
    eps = CommaListField(child=serializers.FloatField(), default=[1e-1, 3e-2, 1e-2, 3e-3])
    n_alpha = serializers.IntegerField(min_value=4, default=64)

    def validate(self, attrs):
        attrs = super().validate(attrs)
        eps = attrs["eps"]
        if any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
            raise serializers.ValidationError({"eps": "must be positive and strictly decreasing"})
        if any(b <= a for a, b in zip(attrs["N"], attrs["N"][1:])):
            raise serializers.ValidationError({"N": "must be increasing"})
        return attrs


class ReproConfigSerializer(SeededSerializer):
    criteria = CommaListField(child=serializers.IntegerField(min_value=1, max_value=9), required=False)
    draws = serializers.IntegerField(min_value=1, default=1000)


class RunRecordSerializer(serializers.ModelSerializer):
    exit_status_label = serializers.CharField(source="get_exit_status_display", read_only=True)
    seed = serializers.SerializerMethodField()

    class Meta:
        model = RunRecord
        fields = (
            "subcommand", "action", "config", "tool_version", "seed",
            "started_at", "wall_time", "exit_status", "exit_status_label",
            "message", "outputs",
        )

    def get_seed(self, record):
        return int(record.seed) if record.seed else None
