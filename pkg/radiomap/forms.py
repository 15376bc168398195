"""
Form-based validation of UE reports and walk-test CSV rows.

Forms collect every violated constraint at once, which is what report validation
and row quarantine need: violations are data, not exceptions.
"""
from django import forms

REPORT_LIMITS = {
    'rsrp': (-156.0, -31.0),
    'rsrq': (-43.0, 20.0),
}

# error code of a cell that holds text but not a number
UNPARSEABLE_CODES = frozenset({'invalid'})


def range_validator(label, low, high):
    def validate(value):
        if value is not None and not (low <= value <= high):
            raise forms.ValidationError(f"{label} range", code='range')
    return validate


def validate_n_prb(value):
    if value is not None and value < 1:
        raise forms.ValidationError("n_prb ≥ 1", code='range')


def required_float(name, **kwargs):
    return forms.FloatField(error_messages={'required': f"{name} missing"}, **kwargs)


class UeReportForm(forms.Form):
    rsrp = forms.FloatField(validators=[range_validator('rsrp', *REPORT_LIMITS['rsrp'])])
    rsrq = forms.FloatField(validators=[range_validator('rsrq', *REPORT_LIMITS['rsrq'])])
    sinr = forms.FloatField(required=False)
    n_prb = forms.IntegerField(validators=[validate_n_prb])
    pci = forms.IntegerField(required=False, validators=[range_validator('pci', 0, 1007)])
    timestamp = forms.FloatField(required=False)


class WalkTestRowForm(forms.Form):
    """One row of the walk-test CSV contract; every cell arrives as text."""

    timestamp_s = required_float('timestamp_s')
    lat_deg = required_float('lat_deg', validators=[range_validator('lat_deg', -90.0, 90.0)])
    lon_deg = required_float('lon_deg', validators=[range_validator('lon_deg', -180.0, 180.0)])
    rsrp_dbm = required_float('rsrp_dbm')
    rsrq_db = required_float('rsrq_db')
    sinr_db = forms.FloatField(required=False)
    pci = forms.IntegerField(required=False)
    n_prb = forms.IntegerField(required=False)


def form_violations(form, ignore_codes=()):
    """Error messages of a bound form, in field declaration order, minus ``ignore_codes``."""
    if form.is_valid():
        return []
    errors = form.errors.as_data()
    messages = []
    for name in form.fields:
        for error in errors.get(name, []):
            if error.code not in ignore_codes:
                messages.extend(error.messages)
    messages.extend(str(message) for message in form.non_field_errors())
    return messages


def unparseable_fields(form):
    """Names of fields whose cells could not be parsed."""
    if form.is_valid():
        return []
    broken = []
    for name, errors in form.errors.as_data().items():
        if any(error.code in UNPARSEABLE_CODES for error in errors):
            broken.append(name)
    return broken
