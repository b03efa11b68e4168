"""Main Application Entry Point

Command-line interface for the LS-IQ imitation-learning toolkit.
Subcommands: expert, collect, train, eval, verify.
"""

import argparse
import sys
from pathlib import Path

from config import Config
from src.errors import LsIqError
from src.lsiq_pipeline import ImitationPipeline


def print_banner():
    """Print application banner"""
    print("\n" + "="*60)
    print("  LS-IQ - Least-Squares Inverse Q-Learning Toolkit")
    print("="*60)


def print_section(title: str):
    print("\n" + "="*60)
    print(title)
    print("="*60)


def print_training_summary(result: dict, verbose: bool = False):
    """
    Print the metrics of a finished training run

    Args:
        result: Dictionary returned by ImitationPipeline.train
        verbose: Whether to print every evaluation row
    """
    rows = result["rows"]
    print_section("TRAINING RESULTS")
    if not rows:
        print("No training steps were run.")
    else:
        shown = rows if verbose else rows[-1:]
        for row in shown:
            line = (
                f"step {row.step:>6}: success={row.success_rate:.2f} "
                f"return={row.discounted_return:.3f} q_abs={row.q_mean_absorbing:.1f}"
            )
            if row.idm_accuracy is not None:
                line += f" idm_acc={row.idm_accuracy:.2f}"
            print(line)
    print(f"\nMetrics: {result['metrics_path']}")
    print(f"Checkpoint: {result['checkpoint_path']}")
    print(f"Time: {result['training_time_seconds']:.1f}s")
    print("="*60 + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="LS-IQ imitation learning on tabular point-mass tasks",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Train and save the expert
  python main.py expert --out runs/expert

  # Write demonstrations without actions
  python main.py collect --lfo --out runs/demos

  # Train from a JSON experiment config
  python main.py train --config configs/point_mass.json --seed 3 --out runs/seed3

  # Score a checkpoint
  python main.py eval --checkpoint runs/seed3/checkpoint.json

  # Run the property suite
  python main.py verify
        """
    )

    parser.add_argument(
        'command',
        nargs='?',
        default='train',
        choices=['expert', 'collect', 'train', 'eval', 'verify'],
        help='What to run (default: train)'
    )

    parser.add_argument(
        '--config',
        type=str,
        default=None,
        help='Experiment JSON file (default: settings from the environment / .env)'
    )

    parser.add_argument(
        '--seed',
        type=int,
        default=None,
        help='Override the experiment seed'
    )

    parser.add_argument(
        '--out',
        type=str,
        default=None,
        help=f'Output directory (default: {Config.OUTPUT_DIR})'
    )

    parser.add_argument(
        '--lfo',
        action='store_true',
        help='Learn from observations: hide expert actions and label them with the IDM'
    )

    parser.add_argument(
        '--checkpoint',
        type=str,
        default=None,
        help='Checkpoint to score (eval only; default: <out>/checkpoint.json)'
    )

    parser.add_argument(
        '--show-config',
        action='store_true',
        help='Display current configuration and exit'
    )

    parser.add_argument(
        '--verbose', '-v',
        action='store_true',
        help='Debug logging and full evaluation history'
    )

    return parser


def main():
    """Main entry point"""
    args = build_parser().parse_args()

    print_banner()

    if args.show_config:
        Config.display()
        return

    try:
        Config.validate()
    except ValueError as e:
        print(f"\n✗ Configuration Error:")
        print(f"{e}\n")
        print("Please check your .env file and ensure all settings are in range.")
        sys.exit(1)

    Config.setup_logging(verbose=args.verbose)
    out_dir = Path(args.out) if args.out else Config.OUTPUT_DIR

    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.lfo:
        overrides["lfo"] = True

    try:
        if args.config:
            pipeline = ImitationPipeline.from_json(Config, args.config, **overrides)
        else:
            pipeline = ImitationPipeline(Config)
            if overrides:
                pipeline = ImitationPipeline(Config, pipeline.experiment.replace(**overrides))
    except (LsIqError, ValueError, OSError) as e:
        print(f"\n✗ Failed to initialize pipeline: {e}")
        if args.verbose:
            import traceback
            traceback.print_exc()
        sys.exit(1)

    try:
        if args.command == 'expert':
            result = pipeline.save_expert(out_dir)
            print_section("EXPERT")
            print(f"Success rate: {result['success_rate']:.2f}")
            print(f"Discounted return: {result['discounted_return']:.3f}")
            print(f"Hazard probability: {result['hazard_probability']:.2e}")
            print(f"\n✓ Expert saved to {result['path']}")

        elif args.command == 'collect':
            result = pipeline.collect(out_dir)
            print(f"\n✓ Wrote {result['n_transitions']} transitions to {result['path']}")
            if not result['observed_actions']:
                print("  (actions hidden: learning from observations)")

        elif args.command == 'train':
            print("\nTraining...")
            result = pipeline.train(out_dir)
            print_training_summary(result, verbose=args.verbose)

        elif args.command == 'eval':
            checkpoint = Path(args.checkpoint) if args.checkpoint else out_dir / "checkpoint.json"
            result = pipeline.evaluate_checkpoint(checkpoint)
            print_section("EVALUATION")
            print(f"Checkpoint: {checkpoint}")
            print(f"Steps trained: {result['steps_trained']}")
            print(f"Success rate: {result['success_rate']:.2f}")
            print(f"Discounted return: {result['discounted_return']:.3f}")
            print("="*60)

        elif args.command == 'verify':
            report = pipeline.verify(show_progress=True)
            print_section("PROPERTY SUITE")
            print(report.summary())
            print("="*60)
            if not report.passed:
                print(f"\n✗ {len(report.failures)} check(s) failed")
                sys.exit(1)
            print("\n✓ All checks passed")

    except KeyboardInterrupt:
        print("\n\nInterrupted by user.")
        sys.exit(1)
    except (LsIqError, ValueError, OSError) as e:
        print(f"\n✗ {args.command} failed: {e}")
        if args.verbose:
            import traceback
            traceback.print_exc()
        sys.exit(1)


if __name__ == "__main__":
    main()
