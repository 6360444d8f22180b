from django.apps import AppConfig


class SpannersConfig(AppConfig):
    name = "spanners"
