"""
Command router - aggregates all command modules.
"""
import click

from app.cli.commands import dims, evaluate, lift, sample, search, verify_f6

COMMANDS = (
    dims.command,
    sample.command,
    evaluate.command,
    search.command,
    verify_f6.command,
    lift.command,
)


def include_commands(group: click.Group) -> click.Group:
    for command in COMMANDS:
        group.add_command(command)
    return group
