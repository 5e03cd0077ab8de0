from rest_framework import serializers


ESTIMATOR_CHOICES = ['nb', 'nn', 'nn-weighted']
PROTOCOL_CHOICES = ['kfold', 'loco', 'graded']


class MentionSerializer(serializers.Serializer):
    """Serializer for one hyperlink anchor inside a corpus record"""
    concept = serializers.CharField(max_length=512)
    start = serializers.IntegerField(min_value=0)
    end = serializers.IntegerField(min_value=0)

    def validate(self, data):
        if data['end'] <= data['start']:
            raise serializers.ValidationError('mention end must be greater than start')
        return data


class CorpusRecordSerializer(serializers.Serializer):
    """Serializer for a corpus line: sentence text plus its mentions"""
    # Offsets index into the raw text, so it must not be trimmed.
    text = serializers.CharField(allow_blank=True, trim_whitespace=False)
    mentions = MentionSerializer(many=True)


class ConceptRowSerializer(serializers.Serializer):
    """Serializer for a row of the concept list file"""
    id = serializers.CharField(max_length=512)
    title = serializers.CharField(max_length=1024)
    label = serializers.IntegerField(min_value=0, max_value=1, required=False, allow_null=True)
    grade = serializers.IntegerField(min_value=0, max_value=10, required=False, allow_null=True)
    categories = serializers.CharField(required=False, allow_blank=True, default='')
    surface_forms = serializers.CharField(required=False, allow_blank=True, default='')

    def to_internal_value(self, data):
        # Empty cells in the delimited file mean "absent".
        cleaned = {}
        for key, value in data.items():
            if key is None:
                continue
            if key in ('label', 'grade') and value in ('', None):
                cleaned[key] = None
            elif value is not None:
                cleaned[key] = value
        return super().to_internal_value(cleaned)


class RunConfigSerializer(serializers.Serializer):
    """Serializer for the effective parameters of an evaluation run"""
    estimator = serializers.ChoiceField(choices=ESTIMATOR_CHOICES, default='nb')
    protocol = serializers.ChoiceField(choices=PROTOCOL_CHOICES, default='kfold')
    radius = serializers.FloatField(min_value=-1.0, max_value=1.0, default=0.3)
    fallback_score = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.5)
    alpha = serializers.FloatField(default=1.0)
    skip_oov = serializers.BooleanField(default=True)
    k = serializers.IntegerField(min_value=2, default=10)
    seed = serializers.IntegerField(min_value=0, default=0)
    held_out_category = serializers.CharField(required=False, allow_null=True, default=None)
    positive_threshold = serializers.IntegerField(min_value=0, max_value=10, default=6)
    negative_sample = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)
    balance = serializers.BooleanField(default=True)
    mask_token = serializers.CharField(default='[MASK]', trim_whitespace=False)

    def validate_radius(self, value):
        if value <= -1.0:
            raise serializers.ValidationError('radius must lie in (-1, 1]')
        return value

    def validate_alpha(self, value):
        if value <= 0:
            raise serializers.ValidationError('alpha must be positive')
        return value


class FoldResultSerializer(serializers.Serializer):
    """Serializer for one fold (or held-out category) of an evaluation"""
    fold = serializers.CharField()
    accuracy = serializers.FloatField(min_value=0.0, max_value=1.0)
    n_train = serializers.IntegerField(min_value=0)
    n_test = serializers.IntegerField(min_value=0)
    n_unscored = serializers.IntegerField(min_value=0)


class EvaluationReportSerializer(serializers.Serializer):
    """Serializer for the complete evaluation report"""
    schema_version = serializers.IntegerField(min_value=1)
    protocol = serializers.ChoiceField(choices=['kfold', 'leave_one_category_out', 'graded'])
    per_fold = FoldResultSerializer(many=True)
    aggregate_accuracy = serializers.FloatField(min_value=0.0, max_value=1.0)
    pearson = serializers.FloatField(min_value=-1.0, max_value=1.0, allow_null=True)
    seed = serializers.IntegerField(min_value=0)
    config = serializers.DictField()
